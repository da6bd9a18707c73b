#pragma once

#include <rsfqlock/netlist.hpp>

#include <cstdint>

namespace rsfqlock::detail
{

/* Word-parallel Boolean function of a non-port gate; `in( p )` yields the word on pin p. */
template<class Fanin>
inline uint64_t gate_function( gate_kind kind, uint32_t count, Fanin&& in )
{
  uint64_t v = 0;
  switch ( kind )
  {
  case gate_kind::const1:
    return ~uint64_t{ 0 };
  case gate_kind::buf:
  case gate_kind::dff:
  case gate_kind::cdff:
    return in( 0 );
  case gate_kind::inv:
    return ~in( 0 );
  case gate_kind::and_:
  case gate_kind::nand:
    v = ~uint64_t{ 0 };
    for ( uint32_t p = 0; p < count; ++p )
      v &= in( p );
    return kind == gate_kind::nand ? ~v : v;
  case gate_kind::or_:
  case gate_kind::nor:
    for ( uint32_t p = 0; p < count; ++p )
      v |= in( p );
    return kind == gate_kind::nor ? ~v : v;
  case gate_kind::xor_:
  case gate_kind::xnor:
    for ( uint32_t p = 0; p < count; ++p )
      v ^= in( p );
    return kind == gate_kind::xnor ? ~v : v;
  case gate_kind::mux2:
  {
    auto const sel = in( 0 );
    return ( sel & in( 2 ) ) | ( ~sel & in( 1 ) );
  }
  default:
    return 0;
  }
}

} // namespace rsfqlock::detail
