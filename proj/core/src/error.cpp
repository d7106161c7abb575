#include "rdmg/error.hpp"

namespace rdmg
{

std::string_view to_string(ErrorKind kind)
{
  switch (kind)
  {
  case ErrorKind::size: return "size error";
  case ErrorKind::alignment: return "alignment error";
  case ErrorKind::domain: return "domain error";
  case ErrorKind::geometry: return "geometry error";
  case ErrorKind::configuration: return "configuration error";
  case ErrorKind::structure: return "structure error";
  case ErrorKind::definiteness: return "definiteness error";
  case ErrorKind::coarse_solve: return "coarse-solve error";
  case ErrorKind::level: return "level error";
  case ErrorKind::index: return "index error";
  case ErrorKind::insufficient_data: return "insufficient-data error";
  case ErrorKind::divergence: return "divergence error";
  case ErrorKind::io: return "io error";
  }
  return "error";
}

Error::Error(ErrorKind kind, const std::string &what)
  : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind)
{
}

void fail(ErrorKind kind, const std::string &what) { throw Error(kind, what); }

} // namespace rdmg
