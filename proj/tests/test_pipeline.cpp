#include "oracles.hpp"

#include <rsfqlock/bench_io.hpp>
#include <rsfqlock/pipeline.hpp>

#include <doctest.h>

using namespace rsfqlock;
using namespace oracles;

namespace
{

std::vector<bit_vector> run( netlist const& ntk, std::vector<bit_vector> const& inputs, bit_vector const& key = {} )
{
  std::vector<stimulus> stim;
  for ( auto const& i : inputs )
    stim.push_back( { i, key.empty() ? bit_vector( ntk.num_key_inputs() ) : key } );
  return simulate_clocked( ntk, stim ).outputs;
}

std::size_t count_kind( netlist const& ntk, gate_kind kind )
{
  std::size_t n = 0;
  for ( auto const& g : ntk.gates() )
    n += g.kind == kind;
  return n;
}

} // namespace

TEST_CASE( "default latency table" )
{
  auto const m = latency_model::rsfq();
  for ( auto k : all_gate_kinds )
    CHECK( m( k ) == ref_latency( k ) );
}

TEST_CASE( "depth of a chain of three clocked gates" )
{
  auto const ntk = parse_bench( "INPUT(i)\nOUTPUT(c)\na = NOT(i)\nb = NOT(a)\nc = NOT(b)\n" );
  auto const d = sequential_depths( ntk );
  CHECK( d[*ntk.find( "i" )] == 0 );
  CHECK( d[*ntk.find( "a" )] == 1 );
  CHECK( d[*ntk.find( "b" )] == 2 );
  CHECK( d[*ntk.find( "c" )] == 3 );
  CHECK( output_latency( ntk ) == 3 );
}

TEST_CASE( "camouflaged DFF adds no depth" )
{
  auto const ntk = parse_bench( "INPUT(i)\nOUTPUT(g)\nc = CDFF(i)\ng = AND(c, i)\n" );
  auto const d = sequential_depths( ntk );
  CHECK( d[*ntk.find( "c" )] == 0 );
  CHECK( d[*ntk.find( "g" )] == 1 );
  CHECK( unbalanced_gates( ntk ).empty() );
}

TEST_CASE( "depth maps agree with a recursive recomputation" )
{
  for ( auto const& name : benchmark_names() )
  {
    CAPTURE( name );
    auto const ntk = load_benchmark( name );
    CHECK( sequential_depths( ntk ) == ref_depths( ntk ) );
    auto const bal = path_balance( ntk );
    CHECK( sequential_depths( bal ) == ref_depths( bal ) );
  }
  rng r( 5 );
  for ( int t = 0; t < 30; ++t )
  {
    auto const ntk = random_netlist( r, 5, 80, 4, 2 );
    CHECK( sequential_depths( ntk ) == ref_depths( ntk ) );
  }
}

TEST_CASE( "balancing an AND with fanin depths 1 and 3 inserts two DFFs on the shallow side" )
{
  auto const ntk = parse_bench( "INPUT(a)\nINPUT(b)\nOUTPUT(y)\np = NOT(a)\nq1 = NOT(b)\nq2 = NOT(q1)\nq3 = NOT(q2)\ny = AND(p, q3)\n" );
  CHECK( unbalanced_gates( ntk ) == std::vector<net_id>{ *ntk.find( "y" ) } );
  CHECK( balancing_cost( ntk ) == 2 );
  auto const bal = path_balance( ntk );
  CHECK( bal.size() == ntk.size() + 2 );
  CHECK( count_kind( bal, gate_kind::dff ) == 2 );
  auto const y = *bal.find( "y" );
  auto const shallow = bal[y].fanins[0];
  CHECK( bal[shallow].kind == gate_kind::dff );
  CHECK( bal[bal[shallow].fanins[0]].kind == gate_kind::dff );
  CHECK( bal[bal[shallow].fanins[0]].fanins[0] == *bal.find( "p" ) );
  CHECK( bal[y].fanins[1] == *bal.find( "q3" ) );
  CHECK( unbalanced_gates( bal ).empty() );
}

TEST_CASE( "path balancing is idempotent and preserves the function" )
{
  for ( auto const& name : benchmark_names() )
  {
    CAPTURE( name );
    auto const ntk = load_benchmark( name );
    auto const bal = path_balance( ntk );
    CHECK( unbalanced_gates( bal ).empty() );
    CHECK( path_balance( bal ) == bal );
    CHECK( balancing_cost( bal ) == 0 );
    CHECK( bal.size() == ntk.size() + balancing_cost( ntk ) );

    /* originals keep their ids and only DFFs are appended */
    for ( net_id n = 0; n < ntk.size(); ++n )
    {
      CHECK( bal[n].kind == ntk[n].kind );
      CHECK( bal[n].name == ntk[n].name );
    }
    for ( net_id n = static_cast<net_id>( ntk.size() ); n < bal.size(); ++n )
      CHECK( bal[n].kind == gate_kind::dff );

    /* every clocked gate sees equal fanin depths and outputs share one depth */
    auto const d = ref_depths( bal );
    for ( net_id n = 0; n < bal.size(); ++n )
    {
      if ( ref_latency( bal[n].kind ) == 0 || bal[n].fanins.empty() )
        continue;
      for ( auto f : bal[n].fanins )
        CHECK( d[f] == d[bal[n].fanins[0]] );
    }
    for ( auto o : bal.outputs() )
      CHECK( d[o] == d[bal.outputs()[0]] );
    CHECK( output_latency( bal ) == d[bal.outputs()[0]] );

    rng r( 17 );
    bool const exhaustive = ntk.num_inputs() <= 12;
    uint64_t const n = exhaustive ? ( uint64_t{ 1 } << ntk.num_inputs() ) : 500;
    for ( uint64_t m = 0; m < n; ++m )
    {
      auto const in = exhaustive ? bit_vector::from_uint( m, ntk.num_inputs() ) : random_bits( r, ntk.num_inputs() );
      REQUIRE( eval_comb( bal, in, {} ) == eval_comb( ntk, in, {} ) );
    }
  }
}

TEST_CASE( "output latency" )
{
  /* three levels, balanced by construction */
  auto const three = parse_bench( "INPUT(a)\nINPUT(b)\nINPUT(c)\nOUTPUT(y)\n"
                                  "x1 = AND(a, b)\nx2 = OR(b, c)\ny1 = XOR(x1, x2)\ny = NOT(y1)\n" );
  CHECK( unbalanced_gates( three ).empty() );
  CHECK( output_latency( three ) == 3 );

  CHECK( output_latency( parse_bench( "INPUT(a)\nOUTPUT(y)\ny = BUF(a)\n" ) ) == 0 );

  auto const uneven = parse_bench( "INPUT(a)\nOUTPUT(y)\nOUTPUT(z)\ny = NOT(a)\nz = BUF(a)\n" );
  CHECK_THROWS_AS( output_latency( uneven ), netlist_error );
  CHECK( output_latency( path_balance( uneven ) ) == 1 );

  auto const c17 = path_balance( load_benchmark( "c17" ) );
  auto const d = sequential_depths( c17 );
  unsigned max_depth = 0;
  for ( auto n : d )
    max_depth = std::max( max_depth, n );
  CHECK( output_latency( c17 ) == max_depth );
  CHECK( output_latency( c17 ) == 3 );
}

TEST_CASE( "DFF delays a pulse by one cycle, CDFF passes it through" )
{
  auto const dff = parse_bench( "INPUT(a)\nOUTPUT(y)\ny = DFF(a)\n" );
  auto const o1 = run( dff, { bit_vector::from_string( "1" ), bit_vector::from_string( "0" ), bit_vector::from_string( "0" ) } );
  CHECK( o1[0].to_string() == "0" );
  CHECK( o1[1].to_string() == "1" );
  CHECK( o1[2].to_string() == "0" );

  auto const cdff = parse_bench( "INPUT(a)\nOUTPUT(y)\ny = CDFF(a)\n" );
  auto const o2 = run( cdff, { bit_vector::from_string( "1" ), bit_vector::from_string( "0" ) } );
  CHECK( o2[0].to_string() == "1" );
  CHECK( o2[1].to_string() == "0" );
}

TEST_CASE( "MUX2 holds two cascaded registers" )
{
  auto const mux = parse_bench( "INPUT(s)\nINPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = MUX2(s, a, b)\n" );
  auto const o = run( mux, { bit_vector::from_string( "101" ), bit_vector::from_string( "010" ),
                             bit_vector::from_string( "000" ), bit_vector::from_string( "000" ) } );
  CHECK( o[0].to_string() == "0" );
  CHECK( o[1].to_string() == "0" );
  CHECK( o[2].to_string() == "1" ); /* s=1 selects b=1 from cycle 0 */
  CHECK( o[3].to_string() == "1" ); /* s=0 selects a=1 from cycle 1 */
}

TEST_CASE( "clocked simulator matches the shift-register reference on random netlists" )
{
  rng r( 23 );
  for ( int t = 0; t < 40; ++t )
  {
    auto const ntk = random_netlist( r, 4, 60, 4, 2 );
    clocked_simulator sim( ntk );
    ref_clocked ref( ntk );
    for ( int c = 0; c < 30; ++c )
    {
      auto const in = random_bits( r, 4 ), key = random_bits( r, 2 );
      REQUIRE( sim.step( in, key ) == ref.step( in, key ) );
    }
  }
}

TEST_CASE( "held stimulus reaches eval_comb after the output latency" )
{
  for ( auto const& name : benchmark_names() )
  {
    CAPTURE( name );
    auto const bal = path_balance( load_benchmark( name ) );
    auto const L = output_latency( bal );
    rng r( 31 );
    clocked_simulator sim( bal );
    for ( int t = 0; t < 100; ++t )
    {
      auto const in = random_bits( r, bal.num_inputs() );
      auto const expected = eval_comb( bal, in, {} );
      for ( unsigned c = 0; c <= L + 2; ++c )
      {
        auto const out = sim.step( in, {} );
        if ( c >= L )
          REQUIRE( out == expected );
      }
    }
  }
}

TEST_CASE( "simulation trace bookkeeping" )
{
  auto const bal = path_balance( load_benchmark( "c17" ) );
  rng r( 2 );
  std::vector<stimulus> stim;
  for ( int i = 0; i < 8; ++i )
    stim.push_back( { random_bits( r, 5 ), {} } );
  auto const a = simulate_clocked( bal, stim );
  auto const b = simulate_clocked( bal, stim );
  CHECK( a.cycles() == 8 );
  CHECK( a.inputs.size() == 8 );
  CHECK( a.warmup == 3 );
  CHECK( a.outputs == b.outputs );
  CHECK( a.is_warmup( 2 ) );
  CHECK_FALSE( a.is_warmup( 3 ) );
  CHECK( a.outputs[0].to_string() == "00" ); /* all registers start at 0 */
  ref_clocked ref( bal );
  for ( std::size_t c = 0; c < a.cycles(); ++c )
    CHECK( a.outputs[c] == ref.step( stim[c].inputs, {} ) );

  auto const csv = trace_to_csv( a );
  CHECK( csv.rfind( "cycle,inputs,keys,outputs,warmup\n", 0 ) == 0 );
  CHECK( std::count( csv.begin(), csv.end(), '\n' ) == 9 );
  CHECK( csv.find( "\n0," + stim[0].inputs.to_string() + ",,00,1\n" ) != std::string::npos );

  std::vector<stimulus> bad{ { bit_vector( 4 ), {} } };
  CHECK_THROWS_AS( simulate_clocked( bal, bad ), width_error );
}

TEST_CASE( "snapshot and restore rewind the simulator" )
{
  auto const bal = path_balance( load_benchmark( "74181" ) );
  clocked_simulator sim( bal );
  rng r( 8 );
  for ( int i = 0; i < 5; ++i )
    sim.step( random_bits( r, bal.num_inputs() ), {} );
  auto const snap = sim.snapshot();
  std::vector<bit_vector> pats, first;
  for ( int i = 0; i < 6; ++i )
  {
    pats.push_back( random_bits( r, bal.num_inputs() ) );
    first.push_back( sim.step( pats.back(), {} ) );
  }
  sim.restore( snap );
  CHECK( sim.cycle() == 5 );
  for ( int i = 0; i < 6; ++i )
    CHECK( sim.step( pats[i], {} ) == first[i] );
  sim.reset();
  CHECK( sim.cycle() == 0 );
}

TEST_CASE( "replacing CDFFs by BUFs keeps behavior, by DFFs adds one cycle" )
{
  /* a balanced host with a CDFF spliced into a path */
  auto const host = path_balance( load_benchmark( "74182" ) );
  auto ntk = host;
  auto const victim = ntk.outputs()[0];
  auto const cd = ntk.add_gate( gate_kind::cdff, { victim }, "cd" );
  ntk.redirect_fanouts( victim, cd, cd );
  REQUIRE( validate( ntk ).empty() );
  REQUIRE( unbalanced_gates( ntk ).empty() );

  auto as_buf = ntk;
  as_buf.rewrite_gate( cd, gate_kind::buf, { victim } );
  auto as_dff = ntk;
  as_dff.rewrite_gate( cd, gate_kind::dff, { victim } );

  CHECK( sequential_depths( as_buf )[cd] == sequential_depths( ntk )[cd] );
  CHECK( sequential_depths( as_dff )[cd] == sequential_depths( ntk )[cd] + 1 );

  auto const L = output_latency( ntk );
  clocked_simulator s1( ntk ), s2( as_buf );
  rng r( 4 );
  for ( int t = 0; t < 50; ++t )
  {
    auto const in = random_bits( r, ntk.num_inputs() );
    CHECK( eval_comb( ntk, in, {} ) == eval_comb( as_buf, in, {} ) );
    for ( unsigned c = 0; c <= L; ++c )
      REQUIRE( s1.step( in, {} ) == s2.step( in, {} ) );
  }
}

TEST_CASE( "activation folds the key into constants" )
{
  auto const ntk = load_majority_fixture();
  auto const key = bit_vector::from_string( "001" );
  auto const act = activate( ntk, key );
  CHECK( act.num_key_inputs() == 0 );
  for ( unsigned abc = 0; abc < 8; ++abc )
  {
    auto const in = bit_vector::from_uint( abc, 3 );
    CHECK( eval_comb( act, in, {} ) == eval_comb( ntk, in, key ) );
  }
  auto const m5 = act[*act.find( "m5" )].kind;
  CHECK( m5 == gate_kind::const0 );
}
