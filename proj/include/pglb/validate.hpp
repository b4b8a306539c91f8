#ifndef PGLB_VALIDATE_HPP_
#define PGLB_VALIDATE_HPP_

#include <string>
#include <vector>

#include "instruction.hpp"

namespace pglb {

struct Diagnostic {
    std::size_t position;
    std::string message;

    std::string str() const { return "position " + std::to_string(position) + ": " + message; }
};

// One diagnostic per out-of-range register reference (index > maxr or
// literal > maxn). Empty means the program is well-formed for `params`.
inline std::vector<Diagnostic> validate(const Program& p, const ToolParams& params) {
    std::vector<Diagnostic> out;
    for (std::size_t pos = 1; pos <= p.length(); ++pos) {
        const auto& u = p.at(pos);
        if (!u.uses_register()) continue;
        if (u.reg() > params.maxr)
            out.push_back({pos, "register index " + std::to_string(u.reg()) + " > maxr (" +
                                    std::to_string(params.maxr) + ")"});
        if (u.kind() == Kind::RegSet && u.value() > params.maxn)
            out.push_back({pos, "register value " + std::to_string(u.value()) + " > maxn (" +
                                    std::to_string(params.maxn) + ")"});
    }
    return out;
}

class InvalidProgram : public std::runtime_error {
public:
    explicit InvalidProgram(std::vector<Diagnostic> diags)
        : std::runtime_error("program does not validate: " + diags.front().str()),
          diags_(std::move(diags)) {}
    const std::vector<Diagnostic>& diagnostics() const { return diags_; }

private:
    std::vector<Diagnostic> diags_;
};

inline void require_valid(const Program& p, const ToolParams& params) {
    params.check();
    if (auto d = validate(p, params); !d.empty()) throw InvalidProgram(std::move(d));
}

}  // namespace pglb

#endif  // PGLB_VALIDATE_HPP_
