#include <rsfqlock/bench_io.hpp>

#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace rsfqlock
{

namespace
{

std::string_view trim( std::string_view s )
{
  while ( !s.empty() && std::isspace( static_cast<unsigned char>( s.front() ) ) )
    s.remove_prefix( 1 );
  while ( !s.empty() && std::isspace( static_cast<unsigned char>( s.back() ) ) )
    s.remove_suffix( 1 );
  return s;
}

bool valid_name( std::string_view s )
{
  if ( s.empty() )
    return false;
  for ( char c : s )
  {
    if ( std::isspace( static_cast<unsigned char>( c ) ) || c == '(' || c == ')' || c == ',' || c == '=' || c == '#' )
      return false;
  }
  return true;
}

/* Splits "KIND(a, b, c)" into keyword and argument names. */
std::pair<std::string_view, std::vector<std::string_view>> split_call( std::string_view s, std::size_t line )
{
  auto const open = s.find( '(' );
  if ( open == std::string_view::npos || s.back() != ')' )
  {
    throw parse_error( line, "expected KEYWORD(...)" );
  }
  auto const kw = trim( s.substr( 0, open ) );
  auto body = trim( s.substr( open + 1, s.size() - open - 2 ) );
  std::vector<std::string_view> args;
  if ( !body.empty() )
  {
    while ( true )
    {
      auto const comma = body.find( ',' );
      auto const arg = trim( body.substr( 0, comma ) );
      if ( !valid_name( arg ) )
      {
        throw parse_error( line, "malformed net name '" + std::string( arg ) + "'" );
      }
      args.push_back( arg );
      if ( comma == std::string_view::npos )
        break;
      body = body.substr( comma + 1 );
    }
  }
  return { kw, args };
}

struct definition
{
  gate_kind kind;
  std::string name;
  std::vector<std::string> args;
  std::size_t line;
};

} // namespace

netlist parse_bench( std::string_view text )
{
  std::vector<definition> defs;
  std::vector<std::pair<std::string, std::size_t>> outputs;
  std::unordered_map<std::string, std::size_t> defined_at;

  std::size_t line_no = 0;
  while ( !text.empty() )
  {
    ++line_no;
    auto const eol = text.find( '\n' );
    auto line = text.substr( 0, eol );
    text = eol == std::string_view::npos ? std::string_view{} : text.substr( eol + 1 );

    if ( auto const hash = line.find( '#' ); hash != std::string_view::npos )
      line = line.substr( 0, hash );
    line = trim( line );
    if ( line.empty() )
      continue;

    auto define = [&]( gate_kind kind, std::string_view name, std::vector<std::string> args ) {
      if ( !valid_name( name ) )
      {
        throw parse_error( line_no, "malformed net name '" + std::string( name ) + "'" );
      }
      auto [it, fresh] = defined_at.emplace( std::string( name ), line_no );
      if ( !fresh )
      {
        throw parse_error( line_no, "duplicate definition of net '" + std::string( name ) + "' (first defined at line " +
                                        std::to_string( it->second ) + ")" );
      }
      defs.push_back( { kind, std::string( name ), std::move( args ), line_no } );
    };

    if ( auto const eq = line.find( '=' ); eq != std::string_view::npos )
    {
      auto const lhs = trim( line.substr( 0, eq ) );
      auto const [kw, args] = split_call( trim( line.substr( eq + 1 ) ), line_no );
      auto const kind = kind_from_keyword( kw );
      if ( !kind || is_port( *kind ) )
      {
        throw parse_error( line_no, "unknown gate keyword '" + std::string( kw ) + "'" );
      }
      if ( !arity_ok( *kind, args.size() ) )
      {
        throw parse_error( line_no, std::string( keyword( *kind ) ) + " takes " + std::string( arity_rule( *kind ) ) +
                                        ", got " + std::to_string( args.size() ) );
      }
      define( *kind, lhs, std::vector<std::string>( args.begin(), args.end() ) );
      continue;
    }

    auto const [kw, args] = split_call( line, line_no );
    std::string word( kw );
    for ( auto& c : word )
      c = static_cast<char>( std::toupper( static_cast<unsigned char>( c ) ) );
    if ( args.size() != 1 || ( word != "INPUT" && word != "KEYINPUT" && word != "OUTPUT" ) )
    {
      throw parse_error( line_no, "expected INPUT(x), KEYINPUT(x), OUTPUT(x) or 'x = KIND(...)'" );
    }
    if ( word == "OUTPUT" )
      outputs.emplace_back( std::string( args.front() ), line_no );
    else
      define( word == "INPUT" ? gate_kind::input : gate_kind::key_input, args.front(), {} );
  }

  std::unordered_map<std::string, net_id> ids;
  for ( std::size_t i = 0; i < defs.size(); ++i )
    ids.emplace( defs[i].name, static_cast<net_id>( i ) );

  auto resolve = [&]( std::string const& name, std::size_t line ) {
    auto it = ids.find( name );
    if ( it == ids.end() )
    {
      throw parse_error( line, "undefined net '" + name + "'" );
    }
    return it->second;
  };

  netlist ntk;
  for ( auto const& d : defs )
  {
    if ( d.kind == gate_kind::input )
    {
      ntk.add_input( d.name );
      continue;
    }
    if ( d.kind == gate_kind::key_input )
    {
      ntk.add_key_input( d.name );
      continue;
    }
    std::vector<net_id> fanins;
    for ( auto const& a : d.args )
      fanins.push_back( resolve( a, d.line ) );
    ntk.add_gate( d.kind, std::move( fanins ), d.name );
  }
  for ( auto const& [name, line] : outputs )
    ntk.add_output( resolve( name, line ) );

  require_valid( ntk );
  return ntk;
}

std::string write_bench( netlist const& ntk )
{
  std::ostringstream os;
  os << "# " << ntk.num_inputs() << " inputs, " << ntk.num_key_inputs() << " key inputs, " << ntk.num_outputs()
     << " outputs\n";

  auto emit = [&]( gate const& g ) {
    if ( is_port( g.kind ) )
    {
      os << keyword( g.kind ) << "(" << g.name << ")\n";
      return;
    }
    os << g.name << " = " << keyword( g.kind ) << "(";
    for ( std::size_t i = 0; i < g.fanins.size(); ++i )
      os << ( i ? ", " : "" ) << ntk[g.fanins[i]].name;
    os << ")\n";
  };

  std::size_t i = 0;
  for ( ; i < ntk.size() && is_port( ntk[i].kind ); ++i )
    emit( ntk[i] );
  for ( auto o : ntk.outputs() )
    os << "OUTPUT(" << ntk[o].name << ")\n";
  for ( ; i < ntk.size(); ++i )
    emit( ntk[i] );
  return os.str();
}

std::string read_text_file( std::filesystem::path const& path )
{
  std::ifstream in( path, std::ios::binary );
  if ( !in )
  {
    throw error( "cannot open '" + path.string() + "'" );
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file( std::filesystem::path const& path, std::string_view text )
{
  if ( path.has_parent_path() )
    std::filesystem::create_directories( path.parent_path() );
  std::ofstream out( path, std::ios::binary );
  if ( !out )
  {
    throw error( "cannot write '" + path.string() + "'" );
  }
  out << text;
}

netlist read_bench_file( std::filesystem::path const& path )
{
  return parse_bench( read_text_file( path ) );
}

void write_bench_file( netlist const& ntk, std::filesystem::path const& path )
{
  write_text_file( path, write_bench( ntk ) );
}

} // namespace rsfqlock
