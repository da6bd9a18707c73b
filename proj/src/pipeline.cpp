#include <rsfqlock/pipeline.hpp>

#include "gate_function.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace rsfqlock
{

latency_model latency_model::rsfq()
{
  latency_model m;
  for ( auto k : { gate_kind::inv, gate_kind::and_, gate_kind::nand, gate_kind::or_, gate_kind::nor,
                   gate_kind::xor_, gate_kind::xnor, gate_kind::dff } )
  {
    m.cycles[static_cast<std::size_t>( k )] = 1;
  }
  m.cycles[static_cast<std::size_t>( gate_kind::mux2 )] = 2;
  return m;
}

depth_map sequential_depths( netlist const& ntk, latency_model const& model )
{
  depth_map depth( ntk.size(), 0 );
  for ( auto g : topo_order( ntk ) )
  {
    auto const& gt = ntk[g];
    unsigned d = 0;
    for ( auto f : gt.fanins )
    {
      d = std::max( d, depth[f] );
    }
    depth[g] = d + model( gt.kind );
  }
  return depth;
}

namespace
{

bool fanins_balanced( gate const& g, depth_map const& depth )
{
  return std::all_of( g.fanins.begin(), g.fanins.end(),
                      [&]( auto f ) { return depth[f] == depth[g.fanins.front()]; } );
}

} // namespace

std::vector<net_id> unbalanced_gates( netlist const& ntk, latency_model const& model )
{
  auto const depth = sequential_depths( ntk, model );
  std::vector<net_id> result;
  for ( net_id g = 0; g < ntk.size(); ++g )
  {
    if ( model( ntk[g].kind ) > 0 && !fanins_balanced( ntk[g], depth ) )
    {
      result.push_back( g );
    }
  }
  return result;
}

netlist path_balance( netlist const& ntk, latency_model const& model )
{
  if ( model( gate_kind::dff ) != 1 )
  {
    throw netlist_error( "path balancing requires a 1-cycle DFF" );
  }
  auto const depth = sequential_depths( ntk, model );
  netlist res = ntk;

  /* chain[f][j] is net f delayed by j cycles */
  std::map<net_id, std::vector<net_id>> chains;
  auto tap = [&]( net_id f, unsigned delay ) {
    auto& c = chains[f];
    if ( c.empty() )
    {
      c.push_back( f );
    }
    while ( c.size() <= delay )
    {
      auto const name = res.unique_name( ntk[f].name + "_pb" + std::to_string( c.size() ) );
      auto const d = res.add_gate( gate_kind::dff, { c.back() }, name );
      c.push_back( d );
    }
    return c[delay];
  };

  for ( auto g : topo_order( ntk ) )
  {
    auto const& gt = ntk[g];
    if ( gt.fanins.size() < 2 || fanins_balanced( gt, depth ) )
    {
      continue;
    }
    unsigned target = 0;
    for ( auto f : gt.fanins )
    {
      target = std::max( target, depth[f] );
    }
    for ( std::size_t p = 0; p < gt.fanins.size(); ++p )
    {
      auto const f = gt.fanins[p];
      if ( depth[f] < target )
      {
        res.set_fanin( g, p, tap( f, target - depth[f] ) );
      }
    }
  }

  unsigned out_depth = 0;
  for ( auto o : ntk.outputs() )
  {
    out_depth = std::max( out_depth, depth[o] );
  }
  for ( std::size_t i = 0; i < ntk.num_outputs(); ++i )
  {
    auto const o = ntk.outputs()[i];
    if ( depth[o] < out_depth )
    {
      res.set_output( i, tap( o, out_depth - depth[o] ) );
    }
  }
  return res;
}

std::size_t balancing_cost( netlist const& ntk, latency_model const& model )
{
  return path_balance( ntk, model ).size() - ntk.size();
}

unsigned output_latency( netlist const& ntk, latency_model const& model )
{
  if ( ntk.num_outputs() == 0 )
  {
    return 0;
  }
  auto const depth = sequential_depths( ntk, model );
  auto const first = depth[ntk.outputs().front()];
  for ( auto o : ntk.outputs() )
  {
    if ( depth[o] != first )
    {
      throw netlist_error( "outputs are unbalanced: '" + ntk[ntk.outputs().front()].name + "' at depth " +
                           std::to_string( first ) + ", '" + ntk[o].name + "' at depth " +
                           std::to_string( depth[o] ) );
    }
  }
  return first;
}

netlist activate( netlist const& ntk, bit_vector const& key )
{
  netlist res = ntk;
  res.bind_key_inputs( key );

  enum class tv : uint8_t
  {
    zero,
    one,
    unknown
  };
  auto const of_bool = []( bool b ) { return b ? tv::one : tv::zero; };

  std::vector<tv> val( res.size(), tv::unknown );
  for ( auto g : topo_order( res ) )
  {
    auto const& gt = res[g];
    auto in = [&]( std::size_t p ) { return val[gt.fanins[p]]; };
    auto const n = gt.fanins.size();
    tv v = tv::unknown;
    switch ( gt.kind )
    {
    case gate_kind::const0:
      v = tv::zero;
      break;
    case gate_kind::const1:
      v = tv::one;
      break;
    case gate_kind::buf:
    case gate_kind::dff:
    case gate_kind::cdff:
      v = in( 0 );
      break;
    case gate_kind::inv:
      v = in( 0 ) == tv::unknown ? tv::unknown : of_bool( in( 0 ) == tv::zero );
      break;
    case gate_kind::and_:
    case gate_kind::nand:
    case gate_kind::or_:
    case gate_kind::nor:
    {
      bool const is_and = gt.kind == gate_kind::and_ || gt.kind == gate_kind::nand;
      auto const dominant = is_and ? tv::zero : tv::one;
      bool all_known = true, dominated = false;
      for ( std::size_t p = 0; p < n; ++p )
      {
        dominated |= in( p ) == dominant;
        all_known &= in( p ) != tv::unknown;
      }
      if ( dominated || all_known )
      {
        bool r = dominated ? !is_and : is_and;
        if ( gt.kind == gate_kind::nand || gt.kind == gate_kind::nor )
          r = !r;
        v = of_bool( r );
      }
      break;
    }
    case gate_kind::xor_:
    case gate_kind::xnor:
    {
      bool parity = gt.kind == gate_kind::xnor;
      bool known = true;
      for ( std::size_t p = 0; p < n; ++p )
      {
        known &= in( p ) != tv::unknown;
        parity ^= in( p ) == tv::one;
      }
      v = known ? of_bool( parity ) : tv::unknown;
      break;
    }
    case gate_kind::mux2:
      if ( in( 0 ) != tv::unknown )
        v = in( in( 0 ) == tv::one ? 2 : 1 );
      else if ( in( 1 ) == in( 2 ) )
        v = in( 1 );
      break;
    default:
      break;
    }
    val[g] = v;
  }

  for ( net_id g = 0; g < res.size(); ++g )
  {
    if ( val[g] == tv::unknown || is_port( res[g].kind ) || is_constant( res[g].kind ) )
    {
      continue;
    }
    res.rewrite_gate( g, val[g] == tv::one ? gate_kind::const1 : gate_kind::const0, {} );
  }
  return res;
}

/* clocked simulation */

clocked_simulator::clocked_simulator( netlist const& ntk, std::size_t words, latency_model const& model )
    : inputs_( ntk.inputs() ), keys_( ntk.key_inputs() ), outputs_( ntk.outputs() ), words_( words ),
      values_( ntk.size() * words, 0 ), scratch_( words, 0 )
{
  if ( words == 0 )
  {
    throw width_error( "simulator needs at least one word per net" );
  }
  uint32_t regs = 0;
  for ( auto g : topo_order( ntk ) )
  {
    auto const& gt = ntk[g];
    auto const r = is_port( gt.kind ) ? 0u : model( gt.kind );
    program_.push_back( { gt.kind, g, static_cast<uint32_t>( pins_.size() ), static_cast<uint32_t>( gt.fanins.size() ), r,
                          regs } );
    pins_.insert( pins_.end(), gt.fanins.begin(), gt.fanins.end() );
    regs += r;
  }
  registers_.assign( static_cast<std::size_t>( regs ) * words, 0 );
}

void clocked_simulator::reset()
{
  std::fill( registers_.begin(), registers_.end(), 0 );
  std::fill( values_.begin(), values_.end(), 0 );
  cycle_ = 0;
}

void clocked_simulator::restore( state const& s )
{
  if ( s.registers.size() != registers_.size() )
  {
    throw width_error( "snapshot does not belong to this simulator" );
  }
  registers_ = s.registers;
  cycle_ = s.cycle;
}

void clocked_simulator::step( std::span<word const> inputs, std::span<word const> keys, std::span<word> outputs )
{
  auto const W = words_;
  if ( inputs.size() != inputs_.size() * W || keys.size() != keys_.size() * W || outputs.size() != outputs_.size() * W )
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
    {
      continue;
    }
    for ( std::size_t w = 0; w < W; ++w )
    {
      scratch_[w] = detail::gate_function( s.kind, s.count, [&]( uint32_t pin ) { return values_[pins_[s.first + pin] * W + w]; } );
    }
    word* out = values_.data() + s.out * W;
    if ( s.regs == 0 )
    {
      std::copy_n( scratch_.begin(), W, out );
      continue;
    }
    word* reg = registers_.data() + static_cast<std::size_t>( s.reg_offset ) * W;
    std::copy_n( reg + ( s.regs - 1 ) * W, W, out );
    for ( auto r = s.regs - 1; r > 0; --r )
    {
      std::copy_n( reg + ( r - 1 ) * W, W, reg + r * W );
    }
    std::copy_n( scratch_.begin(), W, reg );
  }

  for ( std::size_t o = 0; o < outputs_.size(); ++o )
  {
    std::copy_n( values_.begin() + outputs_[o] * W, W, outputs.begin() + o * W );
  }
  ++cycle_;
}

bit_vector clocked_simulator::step( bit_vector const& inputs, bit_vector const& keys )
{
  if ( inputs.width() != inputs_.size() || keys.width() != keys_.size() )
  {
    throw width_error( "stimulus width does not match the ports (" + std::to_string( inputs_.size() ) + " inputs, " +
                       std::to_string( keys_.size() ) + " key inputs)" );
  }
  auto const W = words_;
  std::vector<word> in( inputs_.size() * W ), ks( keys_.size() * W ), out( outputs_.size() * W );
  for ( std::size_t i = 0; i < inputs.width(); ++i )
    std::fill_n( in.begin() + i * W, W, inputs[i] ? ~word{ 0 } : 0 );
  for ( std::size_t i = 0; i < keys.width(); ++i )
    std::fill_n( ks.begin() + i * W, W, keys[i] ? ~word{ 0 } : 0 );
  step( in, ks, out );
  bit_vector result( outputs_.size() );
  for ( std::size_t o = 0; o < outputs_.size(); ++o )
    result.set( o, out[o * W] & 1u );
  return result;
}

sim_trace simulate_clocked( netlist const& ntk, std::span<stimulus const> stimuli, latency_model const& model )
{
  sim_trace trace;
  try
  {
    trace.warmup = output_latency( ntk, model );
  }
  catch ( netlist_error const& )
  {
    auto const depth = sequential_depths( ntk, model );
    for ( auto o : ntk.outputs() )
      trace.warmup = std::max( trace.warmup, depth[o] );
  }

  clocked_simulator sim( ntk, 1, model );
  for ( auto const& s : stimuli )
  {
    trace.outputs.push_back( sim.step( s.inputs, s.keys ) );
    trace.inputs.push_back( s.inputs );
    trace.keys.push_back( s.keys );
  }
  return trace;
}

std::string trace_to_csv( sim_trace const& trace )
{
  std::ostringstream os;
  os << "cycle,inputs,keys,outputs,warmup\n";
  for ( std::size_t c = 0; c < trace.cycles(); ++c )
  {
    os << c << ',' << trace.inputs[c].to_string() << ',' << trace.keys[c].to_string() << ','
       << trace.outputs[c].to_string() << ',' << ( trace.is_warmup( c ) ? 1 : 0 ) << '\n';
  }
  return os.str();
}

} // namespace rsfqlock
