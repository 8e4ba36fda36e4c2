#ifndef SYMDEF_REPORT_HPP
#define SYMDEF_REPORT_HPP

#include <string>

namespace symdef {

// Plain-data result of a named check; the CLI serializes these verbatim.
struct CheckReport {
    std::string check;
    bool pass = false;
    std::string first_failure; // canonical text of the first failing key, empty on pass
    std::string context_tag;
};

inline CheckReport passing(std::string check, std::string tag) {
    return CheckReport{std::move(check), true, "", std::move(tag)};
}

inline CheckReport failing(std::string check, std::string what, std::string tag) {
    return CheckReport{std::move(check), false, std::move(what), std::move(tag)};
}

} // namespace symdef

#endif
