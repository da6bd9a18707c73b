#include <rsfqlock/netlist.hpp>

#include "gate_function.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <functional>
#include <queue>

namespace rsfqlock
{

namespace
{

constexpr std::array<std::string_view, num_gate_kinds> keywords = {
    "INPUT", "KEYINPUT", "CONST0", "CONST1", "BUF", "NOT", "AND", "NAND",
    "OR", "NOR", "XOR", "XNOR", "MUX2", "DFF", "CDFF" };

std::string upper( std::string_view s )
{
  std::string r( s );
  std::transform( r.begin(), r.end(), r.begin(), []( unsigned char c ) { return static_cast<char>( std::toupper( c ) ); } );
  return r;
}

} // namespace

std::string_view keyword( gate_kind kind )
{
  return keywords[static_cast<std::size_t>( kind )];
}

std::optional<gate_kind> kind_from_keyword( std::string_view word )
{
  auto const w = upper( word );
  if ( w == "BUFF" )
  {
    return gate_kind::buf;
  }
  for ( auto k : all_gate_kinds )
  {
    if ( keyword( k ) == w )
    {
      return k;
    }
  }
  return std::nullopt;
}

bool is_port( gate_kind kind ) noexcept
{
  return kind == gate_kind::input || kind == gate_kind::key_input;
}

bool is_constant( gate_kind kind ) noexcept
{
  return kind == gate_kind::const0 || kind == gate_kind::const1;
}

bool is_wire( gate_kind kind ) noexcept
{
  return kind == gate_kind::buf || kind == gate_kind::dff || kind == gate_kind::cdff;
}

bool arity_ok( gate_kind kind, std::size_t fanins ) noexcept
{
  switch ( kind )
  {
  case gate_kind::and_:
  case gate_kind::nand:
  case gate_kind::or_:
  case gate_kind::nor:
    return fanins >= 2;
  case gate_kind::xor_:
  case gate_kind::xnor:
    return fanins == 2;
  case gate_kind::inv:
  case gate_kind::buf:
  case gate_kind::dff:
  case gate_kind::cdff:
    return fanins == 1;
  case gate_kind::mux2:
    return fanins == 3;
  default:
    return fanins == 0;
  }
}

std::string_view arity_rule( gate_kind kind )
{
  switch ( kind )
  {
  case gate_kind::and_:
  case gate_kind::nand:
  case gate_kind::or_:
  case gate_kind::nor:
    return "at least 2 fanins";
  case gate_kind::xor_:
  case gate_kind::xnor:
    return "exactly 2 fanins";
  case gate_kind::inv:
  case gate_kind::buf:
  case gate_kind::dff:
  case gate_kind::cdff:
    return "exactly 1 fanin";
  case gate_kind::mux2:
    return "exactly 3 fanins (select, in0, in1)";
  default:
    return "no fanins";
  }
}

/* netlist */

net_id netlist::push( gate g )
{
  if ( g.name.empty() )
  {
    throw netlist_error( "net names must be non-empty" );
  }
  auto const id = static_cast<net_id>( gates_.size() );
  if ( !by_name_.emplace( g.name, id ).second )
  {
    throw netlist_error( "duplicate definition of net '" + g.name + "'" );
  }
  gates_.push_back( std::move( g ) );
  return id;
}

net_id netlist::add_input( std::string name )
{
  auto const id = push( { gate_kind::input, {}, std::move( name ) } );
  inputs_.push_back( id );
  return id;
}

net_id netlist::add_key_input( std::string name )
{
  auto const id = push( { gate_kind::key_input, {}, std::move( name ) } );
  keys_.push_back( id );
  return id;
}

net_id netlist::add_gate( gate_kind kind, std::vector<net_id> fanins, std::string name )
{
  if ( is_port( kind ) )
  {
    throw netlist_error( "ports are created with add_input/add_key_input" );
  }
  return push( { kind, std::move( fanins ), std::move( name ) } );
}

void netlist::add_output( net_id driver )
{
  outputs_.push_back( driver );
}

void netlist::set_output( std::size_t index, net_id driver )
{
  outputs_.at( index ) = driver;
}

void netlist::set_fanin( net_id g, std::size_t pin, net_id driver )
{
  gates_.at( g ).fanins.at( pin ) = driver;
}

void netlist::rewrite_gate( net_id g, gate_kind kind, std::vector<net_id> fanins )
{
  auto& gt = gates_.at( g );
  if ( is_port( gt.kind ) || is_port( kind ) )
  {
    throw netlist_error( "cannot rewrite port '" + gt.name + "'" );
  }
  gt.kind = kind;
  gt.fanins = std::move( fanins );
}

void netlist::bind_key_inputs( bit_vector const& key )
{
  if ( key.width() != keys_.size() )
  {
    throw width_error( "key width " + std::to_string( key.width() ) + " does not match " +
                       std::to_string( keys_.size() ) + " key inputs" );
  }
  for ( std::size_t i = 0; i < keys_.size(); ++i )
  {
    gates_[keys_[i]].kind = key[i] ? gate_kind::const1 : gate_kind::const0;
  }
  keys_.clear();
}

void netlist::redirect_fanouts( net_id from, net_id to, std::optional<net_id> except )
{
  for ( net_id g = 0; g < gates_.size(); ++g )
  {
    if ( except && *except == g )
    {
      continue;
    }
    std::replace( gates_[g].fanins.begin(), gates_[g].fanins.end(), from, to );
  }
  std::replace( outputs_.begin(), outputs_.end(), from, to );
}

std::string netlist::unique_name( std::string_view stem ) const
{
  std::string name( stem );
  if ( !by_name_.contains( name ) )
  {
    return name;
  }
  for ( std::size_t n = 1;; ++n )
  {
    name = std::string( stem ) + "_" + std::to_string( n );
    if ( !by_name_.contains( name ) )
    {
      return name;
    }
  }
}

std::optional<net_id> netlist::find( std::string_view name ) const
{
  if ( auto it = by_name_.find( std::string( name ) ); it != by_name_.end() )
  {
    return it->second;
  }
  return std::nullopt;
}

std::vector<std::vector<net_id>> netlist::fanouts() const
{
  std::vector<std::vector<net_id>> fo( gates_.size() );
  for ( net_id g = 0; g < gates_.size(); ++g )
  {
    for ( auto f : gates_[g].fanins )
    {
      if ( f < gates_.size() )
      {
        fo[f].push_back( g );
      }
    }
  }
  return fo;
}

/* validation and ordering */

namespace
{

/* Kahn's algorithm over in-range edges; returns the order and leaves
   unprocessed nets (those on or behind a cycle) out of it. */
std::vector<net_id> kahn( netlist const& ntk )
{
  auto const n = ntk.size();
  std::vector<uint32_t> pending( n, 0 );
  std::vector<std::vector<net_id>> readers( n );
  for ( net_id g = 0; g < n; ++g )
  {
    for ( auto f : ntk[g].fanins )
    {
      if ( f < n )
      {
        ++pending[g];
        readers[f].push_back( g );
      }
    }
  }

  std::priority_queue<net_id, std::vector<net_id>, std::greater<>> ready;
  for ( net_id g = 0; g < n; ++g )
  {
    if ( pending[g] == 0 )
    {
      ready.push( g );
    }
  }

  std::vector<net_id> order;
  order.reserve( n );
  while ( !ready.empty() )
  {
    auto const g = ready.top();
    ready.pop();
    order.push_back( g );
    for ( auto r : readers[g] )
    {
      if ( --pending[r] == 0 )
      {
        ready.push( r );
      }
    }
  }
  return order;
}

net_id cycle_member( netlist const& ntk, std::vector<net_id> const& order )
{
  std::vector<bool> done( ntk.size(), false );
  for ( auto g : order )
  {
    done[g] = true;
  }
  net_id cur = 0;
  while ( done[cur] )
  {
    ++cur;
  }
  /* walking backwards through unfinished fanins must revisit a net */
  std::vector<bool> seen( ntk.size(), false );
  while ( !seen[cur] )
  {
    seen[cur] = true;
    for ( auto f : ntk[cur].fanins )
    {
      if ( f < ntk.size() && !done[f] )
      {
        cur = f;
        break;
      }
    }
  }
  return cur;
}

} // namespace

std::vector<diagnostic> validate( netlist const& ntk )
{
  std::vector<diagnostic> diags;
  auto const n = ntk.size();

  for ( net_id g = 0; g < n; ++g )
  {
    auto const& gt = ntk[g];
    if ( !arity_ok( gt.kind, gt.fanins.size() ) )
    {
      diags.push_back( { gt.name, "arity",
                         std::string( keyword( gt.kind ) ) + " gate '" + gt.name + "' has " +
                             std::to_string( gt.fanins.size() ) + " fanins, expected " +
                             std::string( arity_rule( gt.kind ) ) } );
    }
    for ( auto f : gt.fanins )
    {
      if ( f >= n )
      {
        diags.push_back( { gt.name, "undefined net",
                           "gate '" + gt.name + "' reads undefined net #" + std::to_string( f ) } );
      }
    }
  }

  std::vector<int> port_class( n, 0 );
  for ( auto i : ntk.inputs() )
  {
    if ( i >= n || ntk[i].kind != gate_kind::input )
    {
      diags.push_back( { i < n ? ntk[i].name : "#" + std::to_string( i ), "port", "primary input list names a non-input net" } );
    }
    else
    {
      port_class[i] |= 1;
    }
  }
  for ( auto k : ntk.key_inputs() )
  {
    if ( k >= n || ntk[k].kind != gate_kind::key_input )
    {
      diags.push_back( { k < n ? ntk[k].name : "#" + std::to_string( k ), "port", "key input list names a non-key net" } );
    }
    else if ( ( port_class[k] |= 2 ) == 3 )
    {
      diags.push_back( { ntk[k].name, "port", "net is both a primary input and a key input" } );
    }
  }
  for ( net_id g = 0; g < n; ++g )
  {
    if ( is_port( ntk[g].kind ) && port_class[g] == 0 )
    {
      diags.push_back( { ntk[g].name, "port", "port gate missing from the port lists" } );
    }
  }
  for ( auto o : ntk.outputs() )
  {
    if ( o >= n )
    {
      diags.push_back( { "#" + std::to_string( o ), "undefined net", "primary output references undefined net" } );
    }
  }

  auto const order = kahn( ntk );
  if ( order.size() != n )
  {
    auto const m = cycle_member( ntk, order );
    diags.push_back( { ntk[m].name, "cycle", "combinational cycle through net '" + ntk[m].name + "'" } );
  }
  return diags;
}

void require_valid( netlist const& ntk )
{
  auto const diags = validate( ntk );
  if ( diags.empty() )
  {
    return;
  }
  if ( diags.front().rule == "cycle" )
  {
    throw cycle_error( diags.front().net );
  }
  throw netlist_error( diags.front().message );
}

std::vector<net_id> topo_order( netlist const& ntk )
{
  for ( auto const& g : ntk.gates() )
  {
    for ( auto f : g.fanins )
    {
      if ( f >= ntk.size() )
      {
        throw netlist_error( "gate '" + g.name + "' reads undefined net" );
      }
    }
  }
  auto order = kahn( ntk );
  if ( order.size() != ntk.size() )
  {
    throw cycle_error( ntk[cycle_member( ntk, order )].name );
  }
  return order;
}

/* evaluation */

comb_evaluator::comb_evaluator( netlist const& ntk, std::size_t words )
    : inputs_( ntk.inputs() ), keys_( ntk.key_inputs() ), outputs_( ntk.outputs() ), words_( words ),
      values_( ntk.size() * words, 0 )
{
  for ( auto g : topo_order( ntk ) )
  {
    auto const& gt = ntk[g];
    program_.push_back( { gt.kind, g, static_cast<uint32_t>( pins_.size() ), static_cast<uint32_t>( gt.fanins.size() ) } );
    pins_.insert( pins_.end(), gt.fanins.begin(), gt.fanins.end() );
  }
}

void comb_evaluator::run( std::vector<word> const& inputs, std::vector<word> const& keys, std::vector<word>& outputs )
{
  auto const W = words_;
  if ( inputs.size() != inputs_.size() * W || keys.size() != keys_.size() * W )
  {
    throw width_error( "stimulus word count does not match the ports" );
  }
  for ( std::size_t i = 0; i < inputs_.size(); ++i )
  {
    std::copy_n( inputs.begin() + i * W, W, values_.begin() + inputs_[i] * W );
  }
  for ( std::size_t i = 0; i < keys_.size(); ++i )
  {
    std::copy_n( keys.begin() + i * W, W, values_.begin() + keys_[i] * W );
  }

  for ( auto const& s : program_ )
  {
    if ( is_port( s.kind ) )
      continue;
    word* out = values_.data() + s.out * W;
    for ( std::size_t w = 0; w < W; ++w )
    {
      out[w] = detail::gate_function( s.kind, s.count, [&]( uint32_t pin ) { return values_[pins_[s.first + pin] * W + w]; } );
    }
  }

  outputs.resize( outputs_.size() * W );
  for ( std::size_t o = 0; o < outputs_.size(); ++o )
  {
    std::copy_n( values_.begin() + outputs_[o] * W, W, outputs.begin() + o * W );
  }
}

bit_vector eval_comb( netlist const& ntk, bit_vector const& inputs, bit_vector const& keys )
{
  if ( inputs.width() != ntk.num_inputs() )
  {
    throw width_error( "input width " + std::to_string( inputs.width() ) + " does not match " +
                       std::to_string( ntk.num_inputs() ) + " primary inputs" );
  }
  if ( keys.width() != ntk.num_key_inputs() )
  {
    throw width_error( "key width " + std::to_string( keys.width() ) + " does not match " +
                       std::to_string( ntk.num_key_inputs() ) + " key inputs" );
  }
  comb_evaluator ev( ntk, 1 );
  std::vector<uint64_t> in( inputs.width() ), ks( keys.width() ), out;
  for ( std::size_t i = 0; i < inputs.width(); ++i )
    in[i] = inputs[i] ? ~uint64_t{ 0 } : 0;
  for ( std::size_t i = 0; i < keys.width(); ++i )
    ks[i] = keys[i] ? ~uint64_t{ 0 } : 0;
  ev.run( in, ks, out );
  bit_vector result( out.size() );
  for ( std::size_t o = 0; o < out.size(); ++o )
    result.set( o, out[o] & 1u );
  return result;
}

/* area */

jj_cost_table default_jj_costs()
{
  return { { gate_kind::input, 0 }, { gate_kind::key_input, 0 }, { gate_kind::const0, 0 },
           { gate_kind::const1, 0 }, { gate_kind::buf, 2 }, { gate_kind::inv, 9 },
           { gate_kind::and_, 11 }, { gate_kind::nand, 13 }, { gate_kind::or_, 7 },
           { gate_kind::nor, 12 }, { gate_kind::xor_, 9 }, { gate_kind::xnor, 11 },
           { gate_kind::mux2, 18 }, { gate_kind::dff, 6 }, { gate_kind::cdff, 6 } };
}

jj_cost_table jj_costs_from_json( std::string const& text )
{
  auto const doc = nlohmann::json::parse( text );
  if ( !doc.is_object() )
  {
    throw config_error( "JJ cost table must be a JSON object" );
  }
  jj_cost_table costs;
  for ( auto const& [key, value] : doc.items() )
  {
    auto const kind = kind_from_keyword( key );
    if ( !kind || !value.is_number() )
    {
      throw config_error( "bad JJ cost entry '" + key + "'" );
    }
    costs[*kind] = value.get<double>();
  }
  return costs;
}

std::string jj_costs_to_json( jj_cost_table const& costs )
{
  nlohmann::ordered_json doc;
  for ( auto const& [kind, cost] : costs )
  {
    doc[std::string( keyword( kind ) )] = cost;
  }
  return doc.dump( 2 );
}

area_report area_stats( netlist const& ntk, jj_cost_table const& costs )
{
  area_report r;
  for ( auto const& g : ntk.gates() )
  {
    if ( is_port( g.kind ) )
    {
      continue;
    }
    ++r.counts[g.kind];
    ++r.total_gates;
  }
  for ( auto const& [kind, count] : r.counts )
  {
    auto it = costs.find( kind );
    if ( it == costs.end() )
    {
      throw netlist_error( "no JJ cost entry for " + std::string( keyword( kind ) ) );
    }
    r.jj_estimate += it->second * static_cast<double>( count );
  }
  return r;
}

} // namespace rsfqlock
