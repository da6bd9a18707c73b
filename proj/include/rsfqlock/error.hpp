#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rsfqlock
{

class error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class parse_error : public error
{
public:
  parse_error( std::size_t line, std::string const& what )
      : error( "line " + std::to_string( line ) + ": " + what ), line_( line )
  {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

class netlist_error : public error
{
public:
  using error::error;
};

class cycle_error : public netlist_error
{
public:
  explicit cycle_error( std::string net )
      : netlist_error( "combinational cycle through net '" + net + "'" ), net_( std::move( net ) )
  {}

  std::string const& net() const noexcept { return net_; }

private:
  std::string net_;
};

class width_error : public error
{
public:
  using error::error;
};

class config_error : public error
{
public:
  using error::error;
};

} // namespace rsfqlock
