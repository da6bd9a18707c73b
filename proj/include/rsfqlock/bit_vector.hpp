/*!
  \file bit_vector.hpp
  \brief Fixed-width bit sequences for input patterns and key sets

  Bit 0 corresponds to the first declared port.  Conversions to and from
  integers are MSB-first: `from_uint( 4, 3 )` is the string "100".
*/

#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace rsfqlock
{

class bit_vector
{
public:
  bit_vector() = default;

  explicit bit_vector( std::size_t width, bool value = false )
      : bits_( width, value ? 1u : 0u )
  {}

  /*! \brief Parses a string of '0'/'1' characters; index 0 is the first character. */
  static bit_vector from_string( std::string_view text );

  /*! \brief MSB-first conversion; width must be at most 64. */
  static bit_vector from_uint( uint64_t value, std::size_t width );

  std::size_t width() const noexcept { return bits_.size(); }
  bool empty() const noexcept { return bits_.empty(); }

  bool operator[]( std::size_t i ) const { return bits_[i] != 0; }
  bool test( std::size_t i ) const { return bits_.at( i ) != 0; }
  void set( std::size_t i, bool value = true ) { bits_.at( i ) = value ? 1u : 0u; }
  void flip( std::size_t i ) { bits_.at( i ) ^= 1u; }

  std::size_t count() const noexcept;

  uint64_t to_uint() const;
  std::string to_string() const;

  bit_vector slice( std::size_t first, std::size_t count ) const;
  bit_vector complement() const;

  friend bool operator==( bit_vector const&, bit_vector const& ) = default;
  friend auto operator<=>( bit_vector const&, bit_vector const& ) = default;

private:
  std::vector<uint8_t> bits_;
};

} // namespace rsfqlock
