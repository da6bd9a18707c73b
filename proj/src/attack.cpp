#include <rsfqlock/attack.hpp>
#include <rsfqlock/cnf.hpp>
#include <rsfqlock/random.hpp>
#include <rsfqlock/sat_solver.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <bit>
#include <unordered_set>

namespace rsfqlock
{

using word = uint64_t;

namespace
{

constexpr word ones = ~word{ 0 };

/* Candidate c sits in lane c; key bit i of candidate c is bit (n-1-i) of c. */
std::vector<word> candidate_key_words( unsigned n_key, std::size_t words )
{
  std::vector<word> keys( n_key * words, 0 );
  for ( unsigned i = 0; i < n_key; ++i )
  {
    for ( std::size_t lane = 0; lane < ( std::size_t{ 1 } << n_key ); ++lane )
    {
      if ( ( lane >> ( n_key - 1 - i ) ) & 1u )
        keys[i * words + lane / 64] |= word{ 1 } << ( lane % 64 );
    }
  }
  return keys;
}

std::vector<word> broadcast( bit_vector const& bits, std::size_t words )
{
  std::vector<word> v( bits.width() * words );
  for ( std::size_t i = 0; i < bits.width(); ++i )
    std::fill_n( v.begin() + i * words, words, bits[i] ? ones : 0 );
  return v;
}

std::size_t popcount( std::vector<word> const& v )
{
  std::size_t n = 0;
  for ( auto w : v )
    n += std::popcount( w );
  return n;
}

bool lane( std::vector<word> const& v, std::size_t l )
{
  return ( v[l / 64] >> ( l % 64 ) ) & 1u;
}

} // namespace

/* pipelined_probe */

pipelined_probe::pipelined_probe( netlist const& ntk, unsigned latency, std::vector<word> key_words, std::size_t words )
    : sim_( ntk, words ), latency_( latency ), keys_( std::move( key_words ) ), words_( words )
{
  if ( keys_.size() != sim_.num_key_inputs() * words )
  {
    throw width_error( "key word count does not match the key inputs" );
  }
}

std::vector<std::vector<word>> pipelined_probe::apply( bit_vector const& pattern, unsigned hold )
{
  if ( pattern.width() != sim_.num_inputs() )
  {
    throw width_error( "pattern width " + std::to_string( pattern.width() ) + " does not match " +
                       std::to_string( sim_.num_inputs() ) + " primary inputs" );
  }
  if ( hold == 0 )
  {
    throw error( "hold must be at least 1 cycle" );
  }
  auto const in = broadcast( pattern, words_ );
  std::vector<std::vector<word>> seen( hold + latency_, std::vector<word>( sim_.num_outputs() * words_ ) );
  for ( unsigned c = 0; c < hold; ++c )
    sim_.step( in, keys_, seen[c] );
  auto const saved = sim_.snapshot();
  for ( unsigned c = hold; c < hold + latency_; ++c )
    sim_.step( in, keys_, seen[c] );
  sim_.restore( saved );
  return { seen.begin() + latency_, seen.end() };
}

/* oracle */

namespace
{

unsigned activated_latency( locked_netlist const& locked )
{
  return output_latency( activate( locked.ntk, locked.correct_key ) );
}

} // namespace

oracle::oracle( locked_netlist const& locked )
    : probe_( locked.ntk, activated_latency( locked ), broadcast( locked.correct_key, 1 ), 1 ),
      num_inputs_( locked.ntk.num_inputs() )
{
}

std::vector<bit_vector> oracle::query( bit_vector const& pattern, unsigned hold )
{
  auto const raw = probe_.apply( pattern, hold );
  n_clk_ += hold;
  std::vector<bit_vector> out;
  for ( auto const& cycle : raw )
  {
    bit_vector b( cycle.size() );
    for ( std::size_t o = 0; o < cycle.size(); ++o )
      b.set( o, cycle[o] & 1u );
    out.push_back( std::move( b ) );
  }
  return out;
}

void oracle::reset()
{
  probe_.reset();
  n_clk_ = 0;
}

/* reports */

std::string_view status_name( attack_status s )
{
  switch ( s )
  {
  case attack_status::key_recovered:
    return "KeyRecovered";
  case attack_status::failed:
    return "Failed";
  default:
    return "BudgetExhausted";
  }
}

attack_status status_from_name( std::string_view name )
{
  for ( auto s : { attack_status::key_recovered, attack_status::failed, attack_status::budget_exhausted } )
  {
    if ( status_name( s ) == name )
      return s;
  }
  throw config_error( "unknown attack status '" + std::string( name ) + "'" );
}

std::string_view mode_name( sweep_mode m )
{
  return m == sweep_mode::random ? "random" : "exhaustive";
}

sweep_mode mode_from_name( std::string_view name )
{
  if ( name == "random" )
    return sweep_mode::random;
  if ( name == "exhaustive" )
    return sweep_mode::exhaustive;
  throw config_error( "unknown sweep mode '" + std::string( name ) + "' (expected random or exhaustive)" );
}

std::size_t attack_report::eliminated_count() const
{
  std::size_t n = 0;
  for ( auto const& t : trace )
    n += t.eliminated.size();
  return n;
}

uint64_t attack_report::traced_cycles() const
{
  uint64_t n = 0;
  for ( auto const& t : trace )
    n += t.hold;
  return n;
}

std::string report_to_json( attack_report const& r )
{
  nlohmann::ordered_json j;
  j["scheme"] = r.scheme;
  j["n_key"] = r.n_key;
  j["n_c"] = r.n_c;
  j["mode"] = r.mode;
  j["hold"] = r.hold;
  j["seed"] = r.seed;
  j["status"] = status_name( r.status );
  j["iterations"] = r.iterations;
  j["n_clk"] = r.n_clk;
  if ( auto k = r.recovered_key() )
    j["recovered_key"] = k->to_string();
  else
    j["recovered_key"] = nullptr;
  auto& tr = j["trace"] = nlohmann::ordered_json::array();
  for ( auto const& t : r.trace )
  {
    nlohmann::ordered_json e;
    e["pattern"] = t.pattern.to_string();
    e["hold"] = t.hold;
    e["drain"] = t.drain;
    auto& el = e["eliminated"] = nlohmann::ordered_json::array();
    for ( auto const& k : t.eliminated )
      el.push_back( k.to_string() );
    tr.push_back( std::move( e ) );
  }
  return j.dump( 2 ) + "\n";
}

attack_report report_from_json( std::string const& text )
{
  attack_report r;
  try
  {
    auto const j = nlohmann::json::parse( text );
    r.scheme = j.at( "scheme" ).get<std::string>();
    r.n_key = j.at( "n_key" ).get<unsigned>();
    r.n_c = j.at( "n_c" ).get<unsigned>();
    r.mode = j.at( "mode" ).get<std::string>();
    r.hold = j.at( "hold" ).get<unsigned>();
    r.seed = j.at( "seed" ).get<uint64_t>();
    r.status = status_from_name( j.at( "status" ).get<std::string>() );
    r.iterations = j.at( "iterations" ).get<uint64_t>();
    r.n_clk = j.at( "n_clk" ).get<uint64_t>();
    if ( !j.at( "recovered_key" ).is_null() )
      r.recovered_keys.push_back( bit_vector::from_string( j["recovered_key"].get<std::string>() ) );
    for ( auto const& e : j.at( "trace" ) )
    {
      trace_entry t;
      t.pattern = bit_vector::from_string( e.at( "pattern" ).get<std::string>() );
      t.hold = e.at( "hold" ).get<unsigned>();
      t.drain = e.value( "drain", false );
      for ( auto const& k : e.at( "eliminated" ) )
        t.eliminated.push_back( bit_vector::from_string( k.get<std::string>() ) );
      r.trace.push_back( std::move( t ) );
    }
  }
  catch ( nlohmann::json::exception const& e )
  {
    throw config_error( std::string( "attack report: " ) + e.what() );
  }
  return r;
}

/* miter attack */

attack_report miter_sat_attack( locked_netlist const& locked, oracle& o, miter_options const& opts )
{
  auto const& ntk = locked.ntk;
  attack_report rep;
  rep.scheme = scheme_name( locked.kind );
  rep.n_key = locked.n_key;
  rep.n_c = locked.n_c;
  rep.mode = "miter";
  rep.hold = 1;
  rep.seed = locked.seed;

  auto const m = build_miter( ntk, true );
  cnf f = m.formula;
  cdcl_solver solver( f );
  auto sync = [&]( std::size_t from ) {
    for ( auto i = from; i < f.clauses.size(); ++i )
      solver.add_clause( f.clauses[i] );
  };

  auto const t = f.new_var();
  f.add_clause( { t } );
  sync( f.clauses.size() - 1 );

  auto const n_key = static_cast<unsigned>( ntk.num_key_inputs() );
  bool const track = opts.record_eliminations && n_key <= 16;
  std::size_t const lanes = std::size_t{ 1 } << n_key;
  std::size_t const words = ( lanes + 63 ) / 64;
  std::vector<word> alive;
  std::optional<comb_evaluator> bank;
  std::vector<word> bank_keys;
  if ( track )
  {
    alive.assign( words, 0 );
    for ( std::size_t l = 0; l < lanes; ++l )
      alive[l / 64] |= word{ 1 } << ( l % 64 );
    bank.emplace( ntk, words );
    bank_keys = candidate_key_words( n_key, words );
  }

  auto input_literals = [&]( bit_vector const& dip ) {
    std::vector<literal> lits;
    for ( std::size_t i = 0; i < dip.width(); ++i )
      lits.push_back( dip[i] ? t : -t );
    return lits;
  };

  std::size_t script = 0;
  literal const guard[] = { m.guard };
  while ( true )
  {
    std::optional<bit_vector> dip;
    while ( !dip && script < opts.scripted_dips.size() )
    {
      auto const& cand = opts.scripted_dips[script++];
      if ( cand.width() != ntk.num_inputs() )
        throw width_error( "scripted DIP width does not match the primary inputs" );
      std::vector<literal> assume{ m.guard };
      for ( std::size_t i = 0; i < cand.width(); ++i )
        assume.push_back( cand[i] ? m.inputs[i] : -m.inputs[i] );
      if ( solver.solve( assume ).status == sat_status::sat )
        dip = cand;
    }
    if ( !dip )
    {
      auto const r = solver.solve( guard );
      if ( r.status == sat_status::unsat )
        break;
      if ( r.status != sat_status::sat )
        throw error( "solver gave up" );
      bit_vector d( ntk.num_inputs() );
      for ( std::size_t i = 0; i < d.width(); ++i )
        d.set( i, r.value( m.inputs[i] ) );
      dip = d;
    }

    if ( rep.iterations >= opts.budget )
    {
      rep.status = attack_status::budget_exhausted;
      rep.n_clk = o.n_clk();
      return rep;
    }

    auto const observed = o.query( *dip, 1 ).front();
    ++rep.iterations;

    auto const before = f.clauses.size();
    auto const in_lits = input_literals( *dip );
    for ( auto const* keys : { &m.keys_a, &m.keys_b } )
    {
      auto const copy = append_circuit( f, ntk, std::span<literal const>( in_lits ), std::span<literal const>( *keys ) );
      for ( std::size_t out = 0; out < copy.outputs.size(); ++out )
        f.add_clause( { observed[out] ? copy.outputs[out] : -copy.outputs[out] } );
    }
    sync( before );

    trace_entry entry{ *dip, 1, {}, false };
    if ( track )
    {
      std::vector<word> outs;
      bank->run( broadcast( *dip, words ), bank_keys, outs );
      std::vector<word> mismatch( words, 0 );
      for ( std::size_t out = 0; out < observed.width(); ++out )
        for ( std::size_t w = 0; w < words; ++w )
          mismatch[w] |= outs[out * words + w] ^ ( observed[out] ? ones : 0 );
      for ( std::size_t l = 0; l < lanes; ++l )
      {
        if ( lane( alive, l ) && lane( mismatch, l ) )
        {
          entry.eliminated.push_back( bit_vector::from_uint( l, n_key ) );
          alive[l / 64] &= ~( word{ 1 } << ( l % 64 ) );
        }
      }
    }
    rep.trace.push_back( std::move( entry ) );
  }

  rep.n_clk = o.n_clk();
  literal const no_guard[] = { -m.guard };
  auto const final_r = solver.solve( no_guard );
  if ( final_r.status != sat_status::sat )
  {
    rep.status = attack_status::failed;
    return rep;
  }
  bit_vector key( n_key );
  for ( unsigned i = 0; i < n_key; ++i )
    key.set( i, final_r.value( m.keys_a[i] ) );
  rep.recovered_keys.push_back( key );
  rep.status = attack_status::key_recovered;
  return rep;
}

/* sweep attack */

namespace
{

std::vector<uint64_t> pattern_sequence( sweep_options const& opts, unsigned width )
{
  uint64_t const space = width >= 64 ? ~uint64_t{ 0 } : uint64_t{ 1 } << width;
  std::vector<uint64_t> seq;
  if ( opts.mode == sweep_mode::exhaustive )
  {
    if ( width > max_sweep_key_bits )
      throw error( "exhaustive sweep over " + std::to_string( width ) + " probe inputs is not supported" );
    auto const n = std::min( space, opts.budget.value_or( space ) );
    for ( uint64_t v = 0; v < n; ++v )
      seq.push_back( v );
    return seq;
  }

  rng gen( opts.seed );
  if ( width <= 20 )
  {
    for ( uint64_t v = 0; v < space; ++v )
      seq.push_back( v );
    gen.shuffle( seq );
    if ( opts.budget && *opts.budget < seq.size() )
      seq.resize( *opts.budget );
    return seq;
  }
  /* large spaces: unique random patterns up to the budget */
  auto const n = std::min<uint64_t>( space, opts.budget.value_or( uint64_t{ 1 } << 20 ) );
  std::unordered_set<uint64_t> used;
  while ( seq.size() < n )
  {
    auto const v = width >= 64 ? gen.next() : gen.below( space );
    if ( used.insert( v ).second )
      seq.push_back( v );
  }
  return seq;
}

} // namespace

attack_report sweep_attack( locked_netlist const& locked, oracle& o, sweep_options const& opts )
{
  auto const& ntk = locked.ntk;
  auto const n_key = static_cast<unsigned>( ntk.num_key_inputs() );
  if ( n_key > max_sweep_key_bits )
  {
    throw error( "sweep attack tracks at most 2^" + std::to_string( max_sweep_key_bits ) + " candidates, got n_key = " +
                 std::to_string( n_key ) );
  }
  if ( opts.hold == 0 )
  {
    throw error( "hold must be at least 1 cycle" );
  }

  std::vector<std::size_t> probe;
  if ( opts.probe_inputs )
    probe = *opts.probe_inputs;
  else if ( locked.kind == scheme::ll || locked.compare_inputs.empty() )
    for ( std::size_t i = 0; i < ntk.num_inputs(); ++i )
      probe.push_back( i );
  else
    probe = locked.compare_inputs;
  for ( auto i : probe )
    if ( i >= ntk.num_inputs() )
      throw width_error( "probe input index out of range" );

  auto const width = static_cast<unsigned>( probe.size() );
  auto const drain = opts.drain.value_or( locked.n_c );

  attack_report rep;
  rep.scheme = scheme_name( locked.kind );
  rep.n_key = n_key;
  rep.n_c = locked.n_c;
  rep.mode = mode_name( opts.mode );
  rep.hold = opts.hold;
  rep.seed = opts.seed;

  std::size_t const lanes = std::size_t{ 1 } << n_key;
  std::size_t const words = ( lanes + 63 ) / 64;
  pipelined_probe bank( ntk, o.latency(), candidate_key_words( n_key, words ), words );
  std::vector<word> alive( words, 0 );
  for ( std::size_t l = 0; l < lanes; ++l )
    alive[l / 64] |= word{ 1 } << ( l % 64 );
  auto const correct = static_cast<std::size_t>( locked.correct_key.to_uint() );
  auto const start_clk = o.n_clk();

  auto make_pattern = [&]( uint64_t v ) {
    bit_vector p( ntk.num_inputs() );
    for ( unsigned j = 0; j < width; ++j )
      p.set( probe[j], ( v >> ( width - 1 - j ) ) & 1u );
    return p;
  };

  /* applies `cycles` cycles of `pattern`, returns true once a single candidate remains */
  bool const stop_early = opts.mode == sweep_mode::random;
  auto run = [&]( bit_vector const& pattern, unsigned cycles, bool is_drain ) {
    trace_entry entry{ pattern, 0, {}, is_drain };
    unsigned const chunk = stop_early ? 1 : cycles;
    bool single = false;
    for ( unsigned done = 0; done < cycles && !single; done += chunk )
    {
      auto const cand = bank.apply( pattern, chunk );
      auto const obs = o.query( pattern, chunk );
      entry.hold += chunk;
      for ( unsigned c = 0; c < chunk; ++c )
      {
        std::vector<word> mismatch( words, 0 );
        for ( std::size_t out = 0; out < obs[c].width(); ++out )
          for ( std::size_t w = 0; w < words; ++w )
            mismatch[w] |= cand[c][out * words + w] ^ ( obs[c][out] ? ones : 0 );
        for ( std::size_t w = 0; w < words; ++w )
        {
          auto gone = alive[w] & mismatch[w];
          alive[w] &= ~mismatch[w];
          while ( gone )
          {
            auto const l = w * 64 + static_cast<std::size_t>( std::countr_zero( gone ) );
            gone &= gone - 1;
            entry.eliminated.push_back( bit_vector::from_uint( l, n_key ) );
          }
        }
      }
      if ( !lane( alive, correct ) )
      {
        throw error( "soundness violation: the correct key was eliminated" );
      }
      single = stop_early && popcount( alive ) == 1;
    }
    rep.trace.push_back( std::move( entry ) );
    return single;
  };

  auto const seq = pattern_sequence( opts, width );
  uint64_t const space = width >= 64 ? ~uint64_t{ 0 } : uint64_t{ 1 } << width;
  bool single = false;
  bit_vector last = make_pattern( 0 ).complement();
  for ( auto v : seq )
  {
    last = make_pattern( v );
    ++rep.iterations;
    if ( ( single = run( last, opts.hold, false ) ) )
      break;
  }
  if ( !single && drain > 0 )
  {
    bit_vector d( ntk.num_inputs() );
    for ( auto i : probe )
      d.set( i, !last[i] );
    single = run( d, drain, true );
  }

  rep.n_clk = o.n_clk() - start_clk;
  auto const survivors = popcount( alive );
  if ( survivors == 1 )
  {
    rep.status = attack_status::key_recovered;
    for ( std::size_t l = 0; l < lanes; ++l )
      if ( lane( alive, l ) )
        rep.recovered_keys.push_back( bit_vector::from_uint( l, n_key ) );
  }
  else
  {
    rep.status = seq.size() < space ? attack_status::budget_exhausted : attack_status::failed;
  }
  return rep;
}

} // namespace rsfqlock
