#include <rsfqlock/bit_vector.hpp>
#include <rsfqlock/error.hpp>

#include <algorithm>
#include <numeric>

namespace rsfqlock
{

bit_vector bit_vector::from_string( std::string_view text )
{
  bit_vector v( text.size() );
  for ( std::size_t i = 0; i < text.size(); ++i )
  {
    if ( text[i] != '0' && text[i] != '1' )
    {
      throw width_error( "bit string may only contain '0' and '1': \"" + std::string( text ) + "\"" );
    }
    v.bits_[i] = text[i] == '1';
  }
  return v;
}

bit_vector bit_vector::from_uint( uint64_t value, std::size_t width )
{
  if ( width > 64 )
  {
    throw width_error( "from_uint supports at most 64 bits" );
  }
  bit_vector v( width );
  for ( std::size_t i = 0; i < width; ++i )
  {
    v.bits_[i] = ( value >> ( width - 1 - i ) ) & 1u;
  }
  return v;
}

std::size_t bit_vector::count() const noexcept
{
  return std::accumulate( bits_.begin(), bits_.end(), std::size_t{ 0 } );
}

uint64_t bit_vector::to_uint() const
{
  if ( bits_.size() > 64 )
  {
    throw width_error( "to_uint supports at most 64 bits" );
  }
  uint64_t v = 0;
  for ( auto b : bits_ )
  {
    v = ( v << 1 ) | b;
  }
  return v;
}

std::string bit_vector::to_string() const
{
  std::string s( bits_.size(), '0' );
  for ( std::size_t i = 0; i < bits_.size(); ++i )
  {
    s[i] = bits_[i] ? '1' : '0';
  }
  return s;
}

bit_vector bit_vector::slice( std::size_t first, std::size_t count ) const
{
  if ( first + count > bits_.size() )
  {
    throw width_error( "slice out of range" );
  }
  bit_vector v( count );
  std::copy_n( bits_.begin() + first, count, v.bits_.begin() );
  return v;
}

bit_vector bit_vector::complement() const
{
  bit_vector v( *this );
  for ( auto& b : v.bits_ )
  {
    b ^= 1u;
  }
  return v;
}

} // namespace rsfqlock
