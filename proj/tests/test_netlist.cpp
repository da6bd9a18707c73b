#include "oracles.hpp"

#include <rsfqlock/bench_io.hpp>
#include <rsfqlock/netlist.hpp>

#include <doctest.h>

#include <algorithm>
#include <sstream>

using namespace rsfqlock;
using namespace oracles;

namespace
{

std::size_t count_lines_containing( std::string const& text, std::string const& needle )
{
  std::istringstream is( text );
  std::size_t n = 0;
  for ( std::string line; std::getline( is, line ); )
    if ( line.find( needle ) != std::string::npos )
      ++n;
  return n;
}

template<class F>
void expect_parse_error_at( std::string const& text, std::size_t line, F&& check_message )
{
  try
  {
    parse_bench( text );
    FAIL( "no parse error for: " << text );
  }
  catch ( parse_error const& e )
  {
    CHECK( e.line() == line );
    check_message( std::string( e.what() ) );
  }
}

} // namespace

TEST_CASE( "bit_vector conversions" )
{
  CHECK( bit_vector::from_uint( 4, 3 ).to_string() == "100" );
  CHECK( bit_vector::from_string( "0110" ).to_uint() == 6 );
  CHECK( bit_vector::from_string( "101" ).test( 0 ) );
  CHECK( bit_vector::from_string( "101" ).complement().to_string() == "010" );
  CHECK( bit_vector::from_string( "110010" ).slice( 2, 3 ).to_string() == "001" );
  CHECK_THROWS( bit_vector::from_string( "10x" ) );
}

TEST_CASE( "single BUF netlist parses and writes one BUF line" )
{
  auto const ntk = parse_bench( "INPUT(a)\nOUTPUT(y)\ny = BUF(a)" );
  CHECK( ntk.num_inputs() == 1 );
  CHECK( ntk.num_outputs() == 1 );
  CHECK( area_stats( ntk ).total_gates == 1 );
  CHECK( area_stats( ntk ).counts.at( gate_kind::buf ) == 1 );
  auto const text = write_bench( ntk );
  CHECK( count_lines_containing( text, "BUF" ) == 1 );
  CHECK( parse_bench( text ) == ntk );
}

TEST_CASE( "c17 fixture structure" )
{
  auto const ntk = load_benchmark( "c17" );
  CHECK( ntk.num_inputs() == 5 );
  CHECK( ntk.num_outputs() == 2 );
  CHECK( ntk.num_key_inputs() == 0 );
  auto const area = area_stats( ntk );
  CHECK( area.total_gates == 6 );
  CHECK( area.counts.size() == 1 );
  CHECK( area.counts.at( gate_kind::nand ) == 6 );
  CHECK( validate( ntk ).empty() );
}

TEST_CASE( "c17 function matches its NAND equations" )
{
  auto const ntk = load_benchmark( "c17" );
  for ( unsigned m = 0; m < 32; ++m )
  {
    auto const in = bit_vector::from_uint( m, 5 );
    bool const g1 = in[0], g2 = in[1], g3 = in[2], g6 = in[3], g7 = in[4];
    bool const n10 = !( g1 && g3 ), n11 = !( g3 && g6 ), n16 = !( g2 && n11 ), n19 = !( n11 && g7 );
    bool const n22 = !( n10 && n16 ), n23 = !( n16 && n19 );
    auto const out = eval_comb( ntk, in, {} );
    CHECK( out[0] == n22 );
    CHECK( out[1] == n23 );
  }
}

TEST_CASE( "write and parse round trip on every benchmark" )
{
  for ( auto const& name : benchmark_names() )
  {
    CAPTURE( name );
    auto const ntk = load_benchmark( name );
    auto const again = parse_bench( write_bench( ntk ) );
    CHECK( again == ntk );
    CHECK( write_bench( again ) == write_bench( ntk ) );
  }
}

TEST_CASE( "round trip on random netlists with keys and every gate kind" )
{
  rng r( 11 );
  for ( int t = 0; t < 50; ++t )
  {
    auto ntk = random_netlist( r, 4, 30, 3, 2 );
    ntk.add_output( ntk.add_gate( gate_kind::const1, {}, "one" ) );
    ntk.add_output( ntk.add_gate( gate_kind::const0, {}, "zero" ) );
    REQUIRE( validate( ntk ).empty() );
    CHECK( parse_bench( write_bench( ntk ) ) == ntk );
  }
}

TEST_CASE( "CDFF and KEYINPUT keywords are written back" )
{
  auto const ntk = parse_bench( "INPUT(a)\nKEYINPUT(k)\nOUTPUT(y)\nx = CDFF(a)\ny = XOR(x, k)\n" );
  auto const text = write_bench( ntk );
  CHECK( text.find( "x = CDFF(a)" ) != std::string::npos );
  CHECK( text.find( "KEYINPUT(k)" ) != std::string::npos );
  CHECK( ntk.num_key_inputs() == 1 );
}

TEST_CASE( "keywords are case-insensitive, names are case-sensitive" )
{
  auto const ntk = parse_bench( "input(a)\nINPUT(A)\noutput(y)\ny = and(a, A)\nz = buff(y)\n" );
  CHECK( ntk.num_inputs() == 2 );
  CHECK( ntk[*ntk.find( "y" )].kind == gate_kind::and_ );
  CHECK( ntk[*ntk.find( "z" )].kind == gate_kind::buf );
  CHECK( eval_comb( ntk, bit_vector::from_string( "10" ), {} ).to_string() == "0" );
}

TEST_CASE( "parse errors carry the line number" )
{
  expect_parse_error_at( "y = FOO(a)", 1, []( std::string const& m ) { CHECK( m.find( "FOO" ) != std::string::npos ); } );
  expect_parse_error_at( "INPUT(a)\nOUTPUT(y)\ny = AND(a, b)\n", 3,
                         []( std::string const& m ) { CHECK( m.find( "undefined net 'b'" ) != std::string::npos ); } );
  expect_parse_error_at( "INPUT(a)\nINPUT(b)\ny = XOR(a, b, a)\n", 3, []( std::string const& ) {} );
  expect_parse_error_at( "INPUT(a)\ny = NOT(a)\ny = BUF(a)\n", 3,
                         []( std::string const& m ) { CHECK( m.find( "duplicate" ) != std::string::npos ); } );
  expect_parse_error_at( "INPUT(a)\n\n# comment\ny = AND(a)\n", 4, []( std::string const& ) {} );
  expect_parse_error_at( "INPUT(a\n", 1, []( std::string const& ) {} );
}

TEST_CASE( "combinational cycle is rejected" )
{
  CHECK_THROWS_AS( parse_bench( "INPUT(a)\nOUTPUT(y)\ny = AND(a, y)\n" ), cycle_error );
  netlist ntk;
  auto const a = ntk.add_input( "a" );
  auto const g = ntk.add_gate( gate_kind::and_, { a, a }, "g" );
  ntk.set_fanin( g, 1, g );
  ntk.add_output( g );
  try
  {
    topo_order( ntk );
    FAIL( "expected a cycle error" );
  }
  catch ( cycle_error const& e )
  {
    CHECK( e.net() == "g" );
  }
}

TEST_CASE( "validate reports one diagnostic per broken rule" )
{
  CHECK( validate( load_benchmark( "c17" ) ).empty() );

  netlist dangling;
  auto const a = dangling.add_input( "a" );
  dangling.add_output( dangling.add_gate( gate_kind::and_, { a, 42 }, "g" ) );
  auto const d1 = validate( dangling );
  REQUIRE( d1.size() == 1 );
  CHECK( d1[0].rule == "undefined net" );
  CHECK( d1[0].net == "g" );

  netlist wide_xor;
  auto const x = wide_xor.add_input( "x" );
  wide_xor.add_output( wide_xor.add_gate( gate_kind::xor_, { x, x, x }, "w" ) );
  auto const d2 = validate( wide_xor );
  REQUIRE( d2.size() == 1 );
  CHECK( d2[0].rule == "arity" );
  CHECK( d2[0].net == "w" );
  CHECK_THROWS_AS( require_valid( wide_xor ), netlist_error );
}

TEST_CASE( "topological order on a chain and on c17" )
{
  auto const chain = parse_bench( "INPUT(i)\nOUTPUT(c)\nc = NOT(b)\nb = NOT(a)\na = NOT(i)\n" );
  auto const order = topo_order( chain );
  std::vector<std::string> names;
  for ( auto n : order )
    if ( chain[n].kind != gate_kind::input )
      names.push_back( chain[n].name );
  CHECK( names == std::vector<std::string>{ "a", "b", "c" } );

  for ( auto const& name : benchmark_names() )
  {
    CAPTURE( name );
    auto const ntk = load_benchmark( name );
    auto const ord = topo_order( ntk );
    REQUIRE( ord.size() == ntk.size() );
    std::vector<std::size_t> pos( ntk.size() );
    for ( std::size_t i = 0; i < ord.size(); ++i )
      pos[ord[i]] = i;
    for ( net_id n = 0; n < ntk.size(); ++n )
      for ( auto f : ntk[n].fanins )
        CHECK( pos[f] < pos[n] );
    CHECK( topo_order( ntk ) == ord );
  }
}

TEST_CASE( "single AND gate evaluates 11 to 1" )
{
  auto const ntk = parse_bench( "INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = AND(a, b)\n" );
  CHECK( eval_comb( ntk, bit_vector::from_string( "11" ), {} ).to_string() == "1" );
  CHECK( eval_comb( ntk, bit_vector::from_string( "10" ), {} ).to_string() == "0" );
  CHECK_THROWS_AS( eval_comb( ntk, bit_vector::from_string( "1" ), {} ), width_error );
  CHECK_THROWS_AS( eval_comb( ntk, bit_vector::from_string( "11" ), bit_vector::from_string( "1" ) ), width_error );
}

TEST_CASE( "reference locked example reproduces its truth table" )
{
  auto const ntk = load_majority_fixture();
  REQUIRE( ntk.num_inputs() == 3 );
  REQUIRE( ntk.num_key_inputs() == 3 );
  for ( unsigned abc = 0; abc < 8; ++abc )
  {
    for ( unsigned k = 0; k < 8; ++k )
    {
      CAPTURE( abc );
      CAPTURE( k );
      auto const out = eval_comb( ntk, bit_vector::from_uint( abc, 3 ), bit_vector::from_uint( k, 3 ) );
      CHECK( out[0] == majority_fixture_output( abc, k ) );
    }
    CHECK( eval_comb( ntk, bit_vector::from_uint( abc, 3 ), bit_vector::from_string( "001" ) )[0] == majority_fixture_correct( abc ) );
  }
  CHECK( eval_comb( ntk, bit_vector::from_string( "101" ), bit_vector::from_string( "001" ) ).to_string() == "1" );
  CHECK( eval_comb( ntk, bit_vector::from_string( "011" ), bit_vector::from_string( "100" ) ).to_string() == "0" );
}

TEST_CASE( "eval_comb agrees with a recursive evaluator on random netlists" )
{
  rng r( 7 );
  for ( int t = 0; t < 40; ++t )
  {
    unsigned const n_in = 1 + static_cast<unsigned>( r.below( 10 ) );
    unsigned const n_key = static_cast<unsigned>( r.below( 3 ) );
    auto const ntk = random_netlist( r, n_in, 10 + static_cast<unsigned>( r.below( 60 ) ), 3, n_key );
    REQUIRE( validate( ntk ).empty() );
    for ( uint64_t m = 0; m < ( uint64_t{ 1 } << ( n_in + n_key ) ); ++m )
    {
      auto const all = bit_vector::from_uint( m, n_in + n_key );
      auto const in = all.slice( 0, n_in ), key = all.slice( n_in, n_key );
      REQUIRE( eval_comb( ntk, in, key ) == ref_eval( ntk, in, key ) );
    }
  }
}

TEST_CASE( "bit-parallel evaluator agrees lane by lane" )
{
  rng r( 19 );
  auto const ntk = random_netlist( r, 12, 200, 8, 3 );
  std::size_t const words = 4;
  comb_evaluator ev( ntk, words );
  std::vector<uint64_t> in( 12 * words ), keys( 3 * words ), out;
  for ( auto& w : in )
    w = r.next();
  for ( auto& w : keys )
    w = r.next();
  ev.run( in, keys, out );
  REQUIRE( out.size() == ntk.num_outputs() * words );
  for ( std::size_t lane = 0; lane < 64 * words; ++lane )
  {
    auto bit = [&]( std::vector<uint64_t> const& v, std::size_t port ) {
      return ( ( v[port * words + lane / 64] >> ( lane % 64 ) ) & 1 ) != 0;
    };
    bit_vector i( 12 ), k( 3 );
    for ( std::size_t p = 0; p < 12; ++p )
      i.set( p, bit( in, p ) );
    for ( std::size_t p = 0; p < 3; ++p )
      k.set( p, bit( keys, p ) );
    auto const expected = ref_eval( ntk, i, k );
    for ( std::size_t o = 0; o < ntk.num_outputs(); ++o )
      REQUIRE( bit( out, o ) == expected[o] );
  }
}

TEST_CASE( "evaluation is deterministic across calls" )
{
  auto const ntk = load_benchmark( "c880" );
  rng r( 3 );
  for ( int t = 0; t < 20; ++t )
  {
    auto const in = random_bits( r, ntk.num_inputs() );
    CHECK( eval_comb( ntk, in, {} ) == eval_comb( ntk, in, {} ) );
  }
}

TEST_CASE( "area statistics" )
{
  auto const wires = parse_bench( "INPUT(a)\nINPUT(b)\nOUTPUT(x)\nOUTPUT(y)\nx = BUF(a)\ny = BUF(b)\n" );
  auto const wa = area_stats( wires );
  CHECK( wa.total_gates == 2 );
  CHECK( wa.jj_estimate == 2 * default_jj_costs().at( gate_kind::buf ) );

  auto const c880 = load_benchmark( "c880" );
  auto const costs = default_jj_costs();
  auto const rep = area_stats( c880, costs );
  std::size_t total = 0;
  double jj = 0;
  for ( auto const& [k, v] : rep.counts )
  {
    total += v;
    jj += static_cast<double>( v ) * costs.at( k );
  }
  CHECK( rep.total_gates == total );
  CHECK( rep.jj_estimate == doctest::Approx( jj ) );

  auto missing = costs;
  missing.erase( gate_kind::nand );
  CHECK_THROWS( area_stats( load_benchmark( "c17" ), missing ) );
}

TEST_CASE( "JJ cost tables load from JSON" )
{
  auto const costs = jj_costs_from_json( jj_costs_to_json( default_jj_costs() ) );
  CHECK( costs == default_jj_costs() );
  auto const custom = jj_costs_from_json( R"({"NAND": 4, "and": 1.5})" );
  CHECK( custom.at( gate_kind::nand ) == 4 );
  CHECK( custom.at( gate_kind::and_ ) == 1.5 );
  CHECK_THROWS_AS( jj_costs_from_json( R"({"FROB": 1})" ), config_error );
}

TEST_CASE( "redirect_fanouts rewires readers and outputs" )
{
  auto ntk = parse_bench( "INPUT(a)\nINPUT(b)\nOUTPUT(y)\nOUTPUT(x)\nx = AND(a, b)\ny = NOT(x)\n" );
  auto const x = *ntk.find( "x" );
  auto const k = ntk.add_gate( gate_kind::xor_, { x, *ntk.find( "b" ) }, "x_kg" );
  ntk.redirect_fanouts( x, k, k );
  CHECK( ntk[*ntk.find( "y" )].fanins.front() == k );
  CHECK( ntk.outputs()[1] == k );
  CHECK( ntk[k].fanins.front() == x );
  CHECK( validate( ntk ).empty() );
  CHECK( ntk.unique_name( "x" ) == "x_1" );
}

namespace
{

/* bit i of `v` placed at port `first + i` */
void put( bit_vector& in, std::size_t first, unsigned v, unsigned width )
{
  for ( unsigned i = 0; i < width; ++i )
    in.set( first + i, ( v >> i ) & 1 );
}

unsigned take( bit_vector const& out, std::size_t first, unsigned width )
{
  unsigned v = 0;
  for ( unsigned i = 0; i < width; ++i )
    v |= unsigned( out[first + i] ) << i;
  return v;
}

} // namespace

TEST_CASE( "74283 adds two nibbles and a carry" )
{
  auto const ntk = load_benchmark( "74283" );
  for ( unsigned m = 0; m < 512; ++m )
  {
    unsigned const a = m & 15, b = ( m >> 4 ) & 15, c = m >> 8;
    bit_vector in( 9 );
    put( in, 0, a, 4 );
    put( in, 4, b, 4 );
    in.set( 8, c );
    auto const out = ref_eval( ntk, in, {} );
    REQUIRE( take( out, 0, 5 ) == a + b + c );
  }
}

TEST_CASE( "74182 carry look-ahead with active-low generate and propagate" )
{
  auto const ntk = load_benchmark( "74182" );
  for ( unsigned m = 0; m < 512; ++m )
  {
    bit_vector const in = bit_vector::from_uint( m, 9 );
    bool const cn = in[0];
    bool p[4], g[4];
    for ( int i = 0; i < 4; ++i )
    {
      p[i] = !in[1 + 2 * i];
      g[i] = !in[2 + 2 * i];
    }
    bool const cx = g[0] || ( p[0] && cn );
    bool const cy = g[1] || ( p[1] && cx );
    bool const cz = g[2] || ( p[2] && cy );
    bool const group_g = g[3] || ( p[3] && ( g[2] || ( p[2] && ( g[1] || ( p[1] && g[0] ) ) ) ) );
    bool const group_p = p[0] && p[1] && p[2] && p[3];
    auto const out = ref_eval( ntk, in, {} );
    CAPTURE( in.to_string() );
    CHECK( out[0] == !group_p );
    CHECK( out[1] == !group_g );
    CHECK( out[2] == cx );
    CHECK( out[3] == cy );
    CHECK( out[4] == cz );
  }
}

TEST_CASE( "74181 arithmetic and logic functions" )
{
  auto const ntk = load_benchmark( "74181" );
  for ( unsigned m = 0; m < ( 1u << 14 ); ++m )
  {
    unsigned const a = m & 15, b = ( m >> 4 ) & 15, s = ( m >> 8 ) & 15;
    bool const logic = ( m >> 12 ) & 1, cn = ( m >> 13 ) & 1;
    bit_vector in( 14 );
    put( in, 0, a, 4 );
    put( in, 4, b, 4 );
    put( in, 8, s, 4 );
    in.set( 12, logic );
    in.set( 13, cn );

    /* per-bit operands of the internal adder selected by S */
    unsigned const x = ( a | ( ( s & 1 ) ? b : 0 ) | ( ( s & 2 ) ? ~b & 15 : 0 ) ) & 15;
    unsigned const y = ( ( ( s & 4 ) ? a & ~b : 0 ) | ( ( s & 8 ) ? a & b : 0 ) ) & 15;
    unsigned const sum = x + y + ( cn ? 0 : 1 );
    unsigned const f = logic ? ~( x ^ y ) & 15 : sum & 15;

    auto const out = ref_eval( ntk, in, {} );
    CAPTURE( m );
    REQUIRE( take( out, 0, 4 ) == f );
    REQUIRE( out[4] == ( f == 15 ) );
    if ( !logic )
      REQUIRE( out[7] == !( sum >> 4 ) );

    /* active-low group propagate and generate of x + y */
    auto const bit = []( unsigned v, int i ) { return bool( ( v >> i ) & 1 ); };
    bool const group_p = x == 15;
    bool const group_g = bit( y, 3 ) || ( bit( x, 3 ) && ( bit( y, 2 ) || ( bit( x, 2 ) && ( bit( y, 1 ) || ( bit( x, 1 ) && bit( y, 0 ) ) ) ) ) );
    REQUIRE( out[5] == !group_p );
    REQUIRE( out[6] == !group_g );
  }
}
