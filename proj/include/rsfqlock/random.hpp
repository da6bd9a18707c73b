/*!
  \file random.hpp
  \brief Platform-independent seeded randomness

  `std::mt19937_64` has a fully specified output sequence, but the standard
  distributions do not, so ranges are drawn with explicit rejection sampling.
*/

#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace rsfqlock
{

class rng
{
public:
  explicit rng( uint64_t seed ) : engine_( seed ) {}

  uint64_t next() { return engine_(); }

  /*! \brief Uniform value in [0, bound); bound must be positive. */
  uint64_t below( uint64_t bound )
  {
    auto const limit = ~uint64_t{ 0 } - ( ~uint64_t{ 0 } % bound );
    uint64_t v;
    do
    {
      v = engine_();
    } while ( v >= limit );
    return v % bound;
  }

  bool bit() { return engine_() >> 63; }

  template<class T>
  void shuffle( std::vector<T>& v )
  {
    for ( auto i = v.size(); i > 1; --i )
    {
      std::swap( v[i - 1], v[below( i )] );
    }
  }

private:
  std::mt19937_64 engine_;
};

/*! \brief splitmix64 mixing of a base seed with a stream index. */
inline uint64_t derive_seed( uint64_t seed, uint64_t stream )
{
  uint64_t z = seed + 0x9e3779b97f4a7c15ull * ( stream + 1 );
  z = ( z ^ ( z >> 30 ) ) * 0xbf58476d1ce4e5b9ull;
  z = ( z ^ ( z >> 27 ) ) * 0x94d049bb133111ebull;
  return z ^ ( z >> 31 );
}

} // namespace rsfqlock
