#include <rsfqlock/locking.hpp>
#include <rsfqlock/random.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>

namespace rsfqlock
{

std::string_view scheme_name( scheme s )
{
  switch ( s )
  {
  case scheme::ll:
    return "LL";
  case scheme::sarlock:
    return "SARLock";
  case scheme::rsat:
    return "RSAT";
  default:
    return "CSAR";
  }
}

scheme scheme_from_name( std::string_view name )
{
  std::string n;
  for ( char c : name )
  {
    if ( c != '-' && c != '_' )
      n.push_back( static_cast<char>( std::tolower( static_cast<unsigned char>( c ) ) ) );
  }
  if ( n == "ll" || n == "xor" )
    return scheme::ll;
  if ( n == "sarlock" )
    return scheme::sarlock;
  if ( n == "rsat" )
    return scheme::rsat;
  if ( n == "csar" )
    return scheme::csar;
  throw config_error( "unknown locking scheme '" + std::string( name ) + "'" );
}

csar_timing compute_csar_timing( unsigned host_latency, unsigned n_c )
{
  csar_timing t;
  t.N = std::max( host_latency, t.T );
  t.N_s0 = t.N - t.T;
  t.N_s1 = n_c + t.N_s0;
  return t;
}

bit_vector random_key( unsigned n_key, uint64_t seed )
{
  rng gen( seed );
  bit_vector k( n_key );
  for ( unsigned i = 0; i < n_key; ++i )
    k.set( i, gen.bit() );
  return k;
}

namespace
{

/* Small builder that names lock circuitry and keeps the netlist consistent. */
struct builder
{
  netlist& ntk;

  net_id gate( gate_kind kind, std::vector<net_id> fanins, std::string const& stem )
  {
    return ntk.add_gate( kind, std::move( fanins ), ntk.unique_name( stem ) );
  }

  /* N-ary reduction as one gate; a single operand goes through a DFF so the reduction always costs one cycle. */
  net_id reduce( gate_kind kind, std::vector<net_id> const& ops, std::string const& stem )
  {
    if ( ops.size() == 1 )
      return gate( gate_kind::dff, ops, stem );
    return gate( kind, ops, stem );
  }

  net_id delay( net_id from, unsigned cycles, std::string const& stem )
  {
    for ( unsigned i = 0; i < cycles; ++i )
      from = gate( gate_kind::dff, { from }, stem + std::to_string( i + 1 ) );
    return from;
  }
};

void check_common( netlist const& ntk, unsigned n_key, bit_vector const& key, lock_options const& opts )
{
  if ( n_key == 0 )
  {
    throw netlist_error( "at least one key bit is required" );
  }
  if ( key.width() != n_key )
  {
    throw width_error( "correct key has " + std::to_string( key.width() ) + " bits, expected " + std::to_string( n_key ) );
  }
  if ( ntk.num_key_inputs() != 0 )
  {
    throw netlist_error( "host netlist already has key inputs" );
  }
  if ( opts.flip_output >= ntk.num_outputs() )
  {
    throw netlist_error( "flip output index " + std::to_string( opts.flip_output ) + " out of range (" +
                         std::to_string( ntk.num_outputs() ) + " outputs)" );
  }
  auto const width = opts.compare_inputs.empty() ? ntk.num_inputs() : opts.compare_inputs.size();
  if ( n_key > width )
  {
    throw netlist_error( "n_key = " + std::to_string( n_key ) + " exceeds the " + std::to_string( width ) +
                         " comparable primary inputs" );
  }
  for ( auto i : opts.compare_inputs )
  {
    if ( i >= ntk.num_inputs() )
      throw netlist_error( "compare input index " + std::to_string( i ) + " out of range" );
  }
}

std::vector<std::size_t> compare_indices( unsigned n_key, lock_options const& opts )
{
  std::vector<std::size_t> idx;
  for ( unsigned i = 0; i < n_key; ++i )
    idx.push_back( opts.compare_inputs.empty() ? i : opts.compare_inputs[i] );
  return idx;
}

std::vector<net_id> add_keys( netlist& ntk, unsigned n_key )
{
  std::vector<net_id> keys;
  for ( unsigned i = 0; i < n_key; ++i )
    keys.push_back( ntk.add_key_input( ntk.unique_name( "keyinput" + std::to_string( i ) ) ) );
  return keys;
}

/* K'_i = 1 iff key bit i differs from the hard-wired correct bit */
std::vector<net_id> key_checks( builder& b, std::vector<net_id> const& keys, bit_vector const& key )
{
  auto const c0 = b.gate( gate_kind::const0, {}, "lk_gnd" );
  std::vector<net_id> checks;
  for ( std::size_t i = 0; i < keys.size(); ++i )
  {
    checks.push_back( b.gate( key[i] ? gate_kind::xnor : gate_kind::xor_, { keys[i], c0 }, "lk_kchk" + std::to_string( i ) ) );
  }
  return checks;
}

/* Ybar = 1 iff the compared inputs equal the applied key (depth 3) */
net_id comparator_ybar( builder& b, netlist const& ntk, std::vector<net_id> const& keys, std::vector<std::size_t> const& idx,
                        locked_netlist& out )
{
  std::vector<net_id> diffs;
  for ( std::size_t i = 0; i < keys.size(); ++i )
    diffs.push_back( b.gate( gate_kind::xor_, { ntk.inputs()[idx[i]], keys[i] }, "lk_cmp" + std::to_string( i ) ) );
  auto const y = b.reduce( gate_kind::or_, diffs, "lk_Y" );
  auto const ybar = b.gate( gate_kind::inv, { y }, "lk_Ybar" );
  out.landmarks["Y"] = y;
  out.landmarks["Ybar"] = ybar;
  return ybar;
}

/* Ybar as a registered equality (depth 3): its reset value 0 reads as "no match", so a
   consecutive-cycle guard fed from it cannot be armed by warm-up cycles */
net_id equality_ybar( builder& b, netlist const& ntk, std::vector<net_id> const& keys, std::vector<std::size_t> const& idx,
                      locked_netlist& out )
{
  std::vector<net_id> eq;
  for ( std::size_t i = 0; i < keys.size(); ++i )
    eq.push_back( b.gate( gate_kind::xnor, { ntk.inputs()[idx[i]], keys[i] }, "lk_eq" + std::to_string( i ) ) );
  auto const match = b.reduce( gate_kind::and_, eq, "lk_match" );
  auto const ybar = b.gate( gate_kind::dff, { match }, "lk_Ybar" );
  out.landmarks["match"] = match;
  out.landmarks["Ybar"] = ybar;
  return ybar;
}

/* replaces output `index` by XOR(output, flip) */
void attach_flip( builder& b, std::size_t index, net_id flip, locked_netlist& out )
{
  auto const driver = b.ntk.outputs()[index];
  auto const x = b.gate( gate_kind::xor_, { driver, flip }, "lk_flip" );
  b.ntk.set_output( index, x );
  out.landmarks["flip"] = x;
}

locked_netlist prepare( netlist const& ntk, scheme kind, unsigned n_key, bit_vector const& key, lock_options const& opts )
{
  check_common( ntk, n_key, key, opts );
  locked_netlist out;
  out.ntk = ntk;
  out.kind = kind;
  out.correct_key = key;
  out.n_key = n_key;
  out.flip_output = opts.flip_output;
  out.compare_inputs = compare_indices( n_key, opts );
  return out;
}

} // namespace

locked_netlist lock_ll( netlist const& ntk, unsigned n_key, uint64_t seed )
{
  if ( ntk.num_key_inputs() != 0 )
  {
    throw netlist_error( "host netlist already has key inputs" );
  }
  std::vector<net_id> candidates;
  for ( net_id g = 0; g < ntk.size(); ++g )
  {
    auto const k = ntk[g].kind;
    if ( !is_port( k ) && !is_constant( k ) && !is_wire( k ) )
      candidates.push_back( g );
  }
  if ( n_key == 0 || n_key > candidates.size() )
  {
    throw netlist_error( "n_key = " + std::to_string( n_key ) + " but only " + std::to_string( candidates.size() ) +
                         " logic nets are available" );
  }

  rng gen( seed );
  /* partial Fisher-Yates: the first n_key slots become the chosen nets */
  for ( std::size_t i = 0; i < n_key; ++i )
  {
    std::swap( candidates[i], candidates[i + gen.below( candidates.size() - i )] );
  }
  bit_vector key( n_key );
  for ( unsigned i = 0; i < n_key; ++i )
    key.set( i, gen.bit() );

  locked_netlist out;
  out.kind = scheme::ll;
  out.correct_key = key;
  out.n_key = n_key;
  out.seed = seed;

  netlist res = ntk;
  builder b{ res };
  auto const keys = add_keys( res, n_key );
  for ( unsigned i = 0; i < n_key; ++i )
  {
    auto const net = candidates[i];
    auto const kg = b.gate( key[i] ? gate_kind::xnor : gate_kind::xor_, { net, keys[i] }, ntk[net].name + "_kg" );
    res.redirect_fanouts( net, kg, kg );
    out.landmarks["keygate" + std::to_string( i )] = kg;
  }
  out.ntk = path_balance( res );
  return out;
}

locked_netlist lock_sarlock( netlist const& ntk, unsigned n_key, bit_vector const& correct_key, lock_options const& opts )
{
  auto out = prepare( ntk, scheme::sarlock, n_key, correct_key, opts );
  builder b{ out.ntk };
  auto const keys = add_keys( out.ntk, n_key );

  std::vector<net_id> eq;
  for ( unsigned i = 0; i < n_key; ++i )
    eq.push_back( b.gate( gate_kind::xnor, { ntk.inputs()[out.compare_inputs[i]], keys[i] }, "lk_eq" + std::to_string( i ) ) );
  auto const match = b.reduce( gate_kind::and_, eq, "lk_match" );
  auto const x = b.reduce( gate_kind::or_, key_checks( b, keys, correct_key ), "lk_X" );
  auto const flip = b.gate( gate_kind::and_, { match, x }, "lk_sar" );
  out.landmarks["X"] = x;
  out.landmarks["match"] = match;
  attach_flip( b, opts.flip_output, flip, out );
  out.ntk = path_balance( out.ntk );
  return out;
}

locked_netlist lock_sarlock( netlist const& ntk, unsigned n_key, uint64_t seed, lock_options const& opts )
{
  auto out = lock_sarlock( ntk, n_key, random_key( n_key, seed ), opts );
  out.seed = seed;
  return out;
}

locked_netlist lock_rsat( netlist const& ntk, unsigned n_key, bit_vector const& correct_key, lock_options const& opts )
{
  auto out = prepare( ntk, scheme::rsat, n_key, correct_key, opts );
  builder b{ out.ntk };
  auto const keys = add_keys( out.ntk, n_key );

  auto const x = b.reduce( gate_kind::or_, key_checks( b, keys, correct_key ), "lk_X" );
  auto const ybar = comparator_ybar( b, ntk, keys, out.compare_inputs, out );
  auto const d5 = b.gate( gate_kind::dff, { x }, "lk_D5" );
  auto const m = b.gate( gate_kind::mux2, { d5, d5, ybar }, "lk_M" );
  out.landmarks["X"] = x;
  out.landmarks["D5"] = d5;
  out.landmarks["mux"] = m;
  attach_flip( b, opts.flip_output, m, out );
  out.ntk = path_balance( out.ntk );
  return out;
}

locked_netlist lock_csar( netlist const& ntk, unsigned n_key, bit_vector const& correct_key, unsigned n_c,
                          lock_options const& opts )
{
  if ( n_c < 1 )
  {
    throw netlist_error( "C-SAR needs at least one camouflaged DFF" );
  }
  auto out = prepare( ntk, scheme::csar, n_key, correct_key, opts );
  out.n_c = n_c;
  out.ntk = path_balance( ntk );
  auto const host_latency = output_latency( out.ntk );
  auto const t = compute_csar_timing( host_latency, n_c );
  out.timing = t;

  builder b{ out.ntk };
  if ( host_latency < t.T )
  {
    for ( std::size_t o = 0; o < out.ntk.num_outputs(); ++o )
    {
      auto const d = out.ntk.outputs()[o];
      out.ntk.set_output( o, b.delay( d, t.T - host_latency, out.ntk[d].name + "_pad" ) );
    }
  }

  auto const keys = add_keys( out.ntk, n_key );

  /* X path: key mismatch (depth 2), D5, CDFF taps, G2, N_s0 DFFs */
  auto const x = b.reduce( gate_kind::or_, key_checks( b, keys, correct_key ), "lk_X" );
  auto const d5 = b.gate( gate_kind::dff, { x }, "lk_D5" );
  std::vector<net_id> g2_in{ d5 };
  for ( unsigned j = 0; j < n_c; ++j )
    g2_in.push_back( b.gate( gate_kind::cdff, { j == 0 ? x : g2_in.back() }, "lk_cd" + std::to_string( j + 1 ) ) );
  auto const g2 = b.gate( gate_kind::and_, g2_in, "lk_G2" );
  auto const xtap = b.delay( g2, t.N_s0, "lk_s0_" );

  /* Ybar path: consecutive-cycle guard G3 over Ybar and its n_c delayed copies, N_s1 DFFs */
  auto const ybar = equality_ybar( b, ntk, keys, out.compare_inputs, out );
  std::vector<net_id> g3_in{ ybar };
  for ( unsigned j = 0; j < n_c; ++j )
    g3_in.push_back( b.gate( gate_kind::dff, { g3_in.back() }, "lk_u" + std::to_string( j + 1 ) ) );
  auto const g3 = b.gate( gate_kind::and_, g3_in, "lk_G3" );
  auto const ytap = b.delay( g3, t.N_s1, "lk_s1_" );

  auto const m = b.gate( gate_kind::mux2, { xtap, xtap, ytap }, "lk_M" );

  out.landmarks["X"] = x;
  out.landmarks["D5"] = d5;
  out.landmarks["G2"] = g2;
  out.landmarks["G3"] = g3;
  out.landmarks["xtap"] = xtap;
  out.landmarks["ytap"] = ytap;
  out.landmarks["mux"] = m;

  /* the flip XOR costs one cycle; the other outputs follow with one DFF */
  for ( std::size_t o = 0; o < out.ntk.num_outputs(); ++o )
  {
    if ( o == opts.flip_output )
      continue;
    auto const d = out.ntk.outputs()[o];
    out.ntk.set_output( o, b.gate( gate_kind::dff, { d }, out.ntk[d].name + "_out" ) );
  }
  attach_flip( b, opts.flip_output, m, out );
  return out;
}

overhead_report overhead( netlist const& baseline, netlist const& locked, jj_cost_table const& costs )
{
  overhead_report r;
  r.baseline = area_stats( baseline, costs );
  r.locked = area_stats( locked, costs );
  for ( auto k : all_gate_kinds )
  {
    if ( is_port( k ) )
      continue;
    auto const count = []( area_report const& a, gate_kind k ) {
      auto it = a.counts.find( k );
      return it == a.counts.end() ? 0ll : static_cast<long long>( it->second );
    };
    auto const d = count( r.locked, k ) - count( r.baseline, k );
    if ( d != 0 )
      r.delta_counts[k] = d;
  }
  r.delta_total = static_cast<long long>( r.locked.total_gates ) - static_cast<long long>( r.baseline.total_gates );
  r.delta_jj = r.locked.jj_estimate - r.baseline.jj_estimate;
  return r;
}

std::string sidecar_to_json( locked_netlist const& locked )
{
  nlohmann::ordered_json j;
  j["scheme"] = scheme_name( locked.kind );
  j["n_key"] = locked.n_key;
  j["n_c"] = locked.n_c;
  j["seed"] = locked.seed;
  j["correct_key"] = locked.correct_key.to_string();
  j["flip_output"] = locked.flip_output;
  j["compare_inputs"] = locked.compare_inputs;
  if ( locked.timing )
  {
    j["T"] = locked.timing->T;
    j["N"] = locked.timing->N;
    j["N_s0"] = locked.timing->N_s0;
    j["N_s1"] = locked.timing->N_s1;
  }
  else
  {
    j["T"] = j["N"] = j["N_s0"] = j["N_s1"] = nullptr;
  }
  return j.dump( 2 ) + "\n";
}

locked_netlist locked_from_sidecar( netlist ntk, std::string const& json_text )
{
  nlohmann::json j;
  try
  {
    j = nlohmann::json::parse( json_text );
  }
  catch ( nlohmann::json::exception const& e )
  {
    throw config_error( std::string( "sidecar: " ) + e.what() );
  }
  locked_netlist out;
  try
  {
    out.kind = scheme_from_name( j.at( "scheme" ).get<std::string>() );
    out.n_key = j.at( "n_key" ).get<unsigned>();
    out.n_c = j.value( "n_c", 0u );
    out.seed = j.value( "seed", uint64_t{ 0 } );
    out.correct_key = bit_vector::from_string( j.at( "correct_key" ).get<std::string>() );
    out.flip_output = j.value( "flip_output", std::size_t{ 0 } );
    if ( j.contains( "compare_inputs" ) )
      out.compare_inputs = j["compare_inputs"].get<std::vector<std::size_t>>();
    if ( j.contains( "N" ) && !j["N"].is_null() )
    {
      out.timing = csar_timing{ j.at( "T" ).get<unsigned>(), j.at( "N" ).get<unsigned>(), j.at( "N_s0" ).get<unsigned>(),
                                j.at( "N_s1" ).get<unsigned>() };
    }
  }
  catch ( nlohmann::json::exception const& e )
  {
    throw config_error( std::string( "sidecar: " ) + e.what() );
  }
  if ( out.correct_key.width() != out.n_key || ntk.num_key_inputs() != out.n_key )
  {
    throw width_error( "sidecar key width does not match the netlist's key inputs" );
  }
  out.ntk = std::move( ntk );
  return out;
}

} // namespace rsfqlock
