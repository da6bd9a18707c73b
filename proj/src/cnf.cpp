#include <rsfqlock/cnf.hpp>

#include <cstdlib>
#include <sstream>

namespace rsfqlock
{

void cnf::add_clause( std::vector<literal> clause )
{
  for ( auto l : clause )
  {
    if ( l == 0 || std::abs( l ) > num_vars )
    {
      throw error( "literal " + std::to_string( l ) + " outside 1.." + std::to_string( num_vars ) );
    }
  }
  clauses.push_back( std::move( clause ) );
}

std::string to_dimacs( cnf const& f )
{
  std::ostringstream os;
  os << "p cnf " << f.num_vars << " " << f.clauses.size() << "\n";
  for ( auto const& c : f.clauses )
  {
    for ( auto l : c )
      os << l << " ";
    os << "0\n";
  }
  return os.str();
}

cnf from_dimacs( std::string_view text )
{
  cnf f;
  bool header = false;
  std::size_t declared = 0;
  std::vector<literal> current;
  std::size_t line_no = 0;
  std::istringstream in{ std::string( text ) };
  std::string line;
  while ( std::getline( in, line ) )
  {
    ++line_no;
    std::istringstream ls( line );
    std::string tok;
    if ( !( ls >> tok ) || tok == "c" || tok[0] == 'c' || tok == "%" )
      continue;
    if ( tok == "p" )
    {
      std::string fmt;
      long long v = -1, c = -1;
      if ( header || !( ls >> fmt >> v >> c ) || fmt != "cnf" || v < 0 || c < 0 )
      {
        throw parse_error( line_no, "malformed DIMACS header" );
      }
      header = true;
      f.num_vars = static_cast<int>( v );
      declared = static_cast<std::size_t>( c );
      continue;
    }
    if ( !header )
    {
      throw parse_error( line_no, "clause before 'p cnf' header" );
    }
    do
    {
      char* end = nullptr;
      auto const v = std::strtol( tok.c_str(), &end, 10 );
      if ( *end != '\0' )
      {
        throw parse_error( line_no, "bad literal '" + tok + "'" );
      }
      if ( v == 0 )
      {
        try
        {
          f.add_clause( std::move( current ) );
        }
        catch ( error const& e )
        {
          throw parse_error( line_no, e.what() );
        }
        current.clear();
      }
      else
      {
        current.push_back( static_cast<literal>( v ) );
      }
    } while ( ls >> tok );
  }
  if ( !header )
  {
    throw parse_error( line_no, "missing 'p cnf' header" );
  }
  if ( !current.empty() )
  {
    throw parse_error( line_no, "last clause is not terminated by 0" );
  }
  if ( f.clauses.size() != declared )
  {
    throw parse_error( line_no, "header declares " + std::to_string( declared ) + " clauses, found " +
                                    std::to_string( f.clauses.size() ) );
  }
  return f;
}

circuit_literals append_circuit( cnf& f, netlist const& ntk, std::optional<std::span<literal const>> inputs,
                                 std::optional<std::span<literal const>> keys )
{
  if ( inputs && inputs->size() != ntk.num_inputs() )
  {
    throw width_error( "input literal count does not match the primary inputs" );
  }
  if ( keys && keys->size() != ntk.num_key_inputs() )
  {
    throw width_error( "key literal count does not match the key inputs" );
  }

  circuit_literals cl;
  cl.nets.assign( ntk.size(), 0 );
  for ( std::size_t i = 0; i < ntk.num_inputs(); ++i )
    cl.nets[ntk.inputs()[i]] = inputs ? ( *inputs )[i] : f.new_var();
  for ( std::size_t i = 0; i < ntk.num_key_inputs(); ++i )
    cl.nets[ntk.key_inputs()[i]] = keys ? ( *keys )[i] : f.new_var();

  for ( auto g : topo_order( ntk ) )
  {
    auto const& gt = ntk[g];
    if ( is_port( gt.kind ) )
      continue;
    if ( is_wire( gt.kind ) )
    {
      cl.nets[g] = cl.nets[gt.fanins[0]];
      continue;
    }

    auto const y = f.new_var();
    cl.nets[g] = y;
    std::vector<literal> a;
    for ( auto fi : gt.fanins )
      a.push_back( cl.nets[fi] );

    switch ( gt.kind )
    {
    case gate_kind::const0:
      f.add_clause( { -y } );
      break;
    case gate_kind::const1:
      f.add_clause( { y } );
      break;
    case gate_kind::inv:
      f.add_clause( { y, a[0] } );
      f.add_clause( { -y, -a[0] } );
      break;
    case gate_kind::and_:
    case gate_kind::nand:
    {
      auto const o = gt.kind == gate_kind::and_ ? y : -y;
      std::vector<literal> big{ o };
      for ( auto l : a )
      {
        f.add_clause( { -o, l } );
        big.push_back( -l );
      }
      f.add_clause( std::move( big ) );
      break;
    }
    case gate_kind::or_:
    case gate_kind::nor:
    {
      auto const o = gt.kind == gate_kind::or_ ? y : -y;
      std::vector<literal> big{ -o };
      for ( auto l : a )
      {
        f.add_clause( { o, -l } );
        big.push_back( l );
      }
      f.add_clause( std::move( big ) );
      break;
    }
    case gate_kind::xor_:
    case gate_kind::xnor:
    {
      auto const o = gt.kind == gate_kind::xor_ ? y : -y;
      f.add_clause( { -o, a[0], a[1] } );
      f.add_clause( { -o, -a[0], -a[1] } );
      f.add_clause( { o, -a[0], a[1] } );
      f.add_clause( { o, a[0], -a[1] } );
      break;
    }
    case gate_kind::mux2:
    {
      auto const s = a[0], d0 = a[1], d1 = a[2];
      f.add_clause( { -s, -d1, y } );
      f.add_clause( { -s, d1, -y } );
      f.add_clause( { s, -d0, y } );
      f.add_clause( { s, d0, -y } );
      f.add_clause( { -d0, -d1, y } );
      f.add_clause( { d0, d1, -y } );
      break;
    }
    default:
      throw netlist_error( "cannot encode gate '" + gt.name + "'" );
    }
  }

  for ( auto i : ntk.inputs() )
    cl.inputs.push_back( cl.nets[i] );
  for ( auto k : ntk.key_inputs() )
    cl.keys.push_back( cl.nets[k] );
  for ( auto o : ntk.outputs() )
    cl.outputs.push_back( cl.nets[o] );
  return cl;
}

cnf encode_tseitin( netlist const& ntk )
{
  cnf f;
  f.net_literal = append_circuit( f, ntk ).nets;
  return f;
}

miter build_miter( netlist const& locked, bool guarded )
{
  miter m;
  auto const a = append_circuit( m.formula, locked );
  auto const b = append_circuit( m.formula, locked, std::span<literal const>( a.inputs ) );
  m.inputs = a.inputs;
  m.keys_a = a.keys;
  m.keys_b = b.keys;
  m.outputs_a = a.outputs;
  m.outputs_b = b.outputs;

  auto& f = m.formula;
  std::vector<literal> differ;
  for ( std::size_t o = 0; o < a.outputs.size(); ++o )
  {
    auto const x = a.outputs[o], y = b.outputs[o];
    auto const d = f.new_var();
    f.add_clause( { -d, x, y } );
    f.add_clause( { -d, -x, -y } );
    f.add_clause( { d, -x, y } );
    f.add_clause( { d, x, -y } );
    differ.push_back( d );
  }
  if ( guarded )
  {
    m.guard = f.new_var();
    differ.push_back( -m.guard );
  }
  f.add_clause( std::move( differ ) );
  return m;
}

} // namespace rsfqlock
