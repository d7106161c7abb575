#ifndef RDMG_ERROR_HPP
#define RDMG_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace rdmg
{

// Failure categories raised by the library. Each operation documents which
// kinds it may throw.
enum class ErrorKind
{
  size,
  alignment,
  domain,
  geometry,
  configuration,
  structure,
  definiteness,
  coarse_solve,
  level,
  index,
  insufficient_data,
  divergence,
  io,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error
{
public:
  Error(ErrorKind kind, const std::string &what);

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string &what);

} // namespace rdmg

#endif // RDMG_ERROR_HPP
