#ifndef RPLSIM_VERSION_HPP
#define RPLSIM_VERSION_HPP

namespace rplsim {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace rplsim

#endif  // RPLSIM_VERSION_HPP
