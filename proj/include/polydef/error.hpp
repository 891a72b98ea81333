#pragma once

#include <stdexcept>
#include <string>

namespace polydef {

// Error categories; the CLI maps each onto a distinct exit code.
enum class errc {
    domain,     // precondition or invariant violation
    parse,      // malformed input file
    not_found,  // lookup failed (site, label, config name)
    io          // filesystem problem
};

class error : public std::runtime_error {
public:
    error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    errc code() const noexcept { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void fail_domain(const std::string& msg) { throw error(errc::domain, msg); }
[[noreturn]] inline void fail_parse(const std::string& msg) { throw error(errc::parse, msg); }
[[noreturn]] inline void fail_not_found(const std::string& msg) { throw error(errc::not_found, msg); }
[[noreturn]] inline void fail_io(const std::string& msg) { throw error(errc::io, msg); }

} // namespace polydef
