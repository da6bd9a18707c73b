#include <rsfqlock/bench_io.hpp>
#include <rsfqlock/harness.hpp>
#include <rsfqlock/random.hpp>

#include <nlohmann/json.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <thread>

namespace rsfqlock
{

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace
{

std::vector<unsigned> uint_list( json const& j, std::string const& what )
{
  std::vector<unsigned> v;
  if ( j.is_number_unsigned() )
  {
    v.push_back( j.get<unsigned>() );
  }
  else if ( j.is_array() )
  {
    for ( auto const& e : j )
    {
      if ( !e.is_number_unsigned() )
        throw config_error( what + " must contain non-negative integers" );
      v.push_back( e.get<unsigned>() );
    }
  }
  else
  {
    throw config_error( what + " must be an integer or a list of integers" );
  }
  if ( v.empty() )
  {
    throw config_error( what + " must not be empty" );
  }
  return v;
}

row_spec parse_row( json const& j, std::string const& table_id )
{
  if ( !j.is_object() )
    throw config_error( "table " + table_id + ": rows must be objects" );
  row_spec r;
  r.kind = scheme_from_name( j.at( "scheme" ).get<std::string>() );
  r.label = j.value( "label", std::string( scheme_name( r.kind ) ) );
  r.n_key = uint_list( j.at( "n_key" ), "n_key" );
  for ( auto k : r.n_key )
  {
    if ( k == 0 )
      throw config_error( "row " + r.label + ": n_key must be positive" );
  }
  if ( j.contains( "n_c" ) )
    r.n_c = uint_list( j["n_c"], "n_c" );
  else if ( r.kind == scheme::csar )
    r.n_c = { 1 };
  if ( r.kind == scheme::csar )
  {
    for ( auto c : r.n_c )
      if ( c == 0 )
        throw config_error( "row " + r.label + ": C-SAR needs n_c >= 1" );
  }
  else if ( r.n_c != std::vector<unsigned>{ 0 } )
  {
    throw config_error( "row " + r.label + ": n_c only applies to CSAR" );
  }

  r.metric = j.value( "metric", std::string( table_id == "AREA" ? "gates" : "n_clk" ) );
  if ( r.metric != "n_clk" && r.metric != "gates" && r.metric != "jj" )
    throw config_error( "row " + r.label + ": unknown metric '" + r.metric + "'" );
  r.attack = j.value( "attack", std::string( r.metric == "n_clk" ? "sweep" : "none" ) );
  if ( r.attack != "sweep" && r.attack != "miter" && r.attack != "none" )
    throw config_error( "row " + r.label + ": unknown attack '" + r.attack + "'" );
  if ( ( r.attack == "none" ) != ( r.metric != "n_clk" ) )
    throw config_error( "row " + r.label + ": n_clk needs an attack, area metrics need attack \"none\"" );
  if ( j.contains( "mode" ) )
    r.mode = mode_from_name( j["mode"].get<std::string>() );
  if ( j.contains( "hold" ) )
  {
    auto const& h = j["hold"];
    if ( h.is_string() && h.get<std::string>() == "ssat" )
      r.ssat_hold = true;
    else if ( h.is_number_unsigned() && h.get<unsigned>() >= 1 )
      r.hold = h.get<unsigned>();
    else
      throw config_error( "row " + r.label + ": hold must be a positive integer or \"ssat\"" );
  }
  r.rounds = j.value( "rounds", 1u );
  if ( r.rounds == 0 )
    throw config_error( "row " + r.label + ": rounds must be positive" );
  return r;
}

std::string format_number( double v )
{
  if ( std::floor( v ) == v && std::abs( v ) < 1e15 )
    return std::to_string( static_cast<long long>( v ) );
  char buf[64];
  std::snprintf( buf, sizeof( buf ), "%.2f", v );
  std::string s = buf;
  while ( s.back() == '0' )
    s.pop_back();
  if ( s.back() == '.' )
    s.pop_back();
  return s;
}

/* mean of numeric cells, "x" if any cell is not a number */
std::string average( std::vector<std::string> const& values )
{
  double sum = 0;
  for ( auto const& v : values )
  {
    char* end = nullptr;
    auto const d = std::strtod( v.c_str(), &end );
    if ( v.empty() || *end != '\0' )
      return v == "error" ? "error" : "x";
    sum += d;
  }
  return format_number( sum / static_cast<double>( values.size() ) );
}

std::string column_name( row_spec const& r, unsigned n_key, unsigned n_c )
{
  auto name = r.label + "_k" + std::to_string( n_key );
  if ( r.kind == scheme::csar )
    name += "_c" + std::to_string( n_c );
  return name;
}

std::string bench_name( fs::path const& p )
{
  return p.stem().string();
}

} // namespace

experiment_config parse_config( std::string const& text, fs::path const& base_dir )
{
  json j;
  try
  {
    j = json::parse( text );
  }
  catch ( json::exception const& e )
  {
    throw config_error( std::string( "config is not valid JSON: " ) + e.what() );
  }

  experiment_config cfg;
  try
  {
    if ( !j.is_object() )
      throw config_error( "config must be a JSON object" );
    if ( !j.contains( "seed" ) || !j["seed"].is_number_unsigned() )
      throw config_error( "config needs an explicit non-negative integer \"seed\"" );
    cfg.seed = j["seed"].get<uint64_t>();
    cfg.output_dir = ( base_dir / j.value( "output_dir", std::string( "out" ) ) ).lexically_normal();
    if ( j.contains( "jj_costs" ) )
    {
      auto const p = base_dir / j["jj_costs"].get<std::string>();
      if ( !fs::exists( p ) )
        throw config_error( "JJ cost table '" + p.string() + "' does not exist" );
      cfg.costs = jj_costs_from_json( read_text_file( p ) );
    }
    if ( !j.contains( "tables" ) || !j["tables"].is_array() || j["tables"].empty() )
      throw config_error( "config needs a non-empty \"tables\" list" );

    std::set<std::string> ids;
    for ( auto const& t : j["tables"] )
    {
      table_spec ts;
      ts.id = t.at( "id" ).get<std::string>();
      if ( ts.id != "T2" && ts.id != "T3" && ts.id != "T4" && ts.id != "AREA" )
        throw config_error( "unknown table id '" + ts.id + "' (expected T2, T3, T4 or AREA)" );
      if ( !ids.insert( ts.id ).second )
        throw config_error( "table '" + ts.id + "' defined twice" );
      if ( !t.contains( "benchmarks" ) || !t["benchmarks"].is_array() || t["benchmarks"].empty() )
        throw config_error( "table " + ts.id + ": benchmark list is empty" );
      for ( auto const& b : t["benchmarks"] )
      {
        auto const p = ( base_dir / b.get<std::string>() ).lexically_normal();
        if ( !fs::exists( p ) )
          throw config_error( "table " + ts.id + ": benchmark '" + p.string() + "' does not exist" );
        ts.benchmarks.push_back( p );
      }
      if ( !t.contains( "rows" ) || !t["rows"].is_array() || t["rows"].empty() )
        throw config_error( "table " + ts.id + ": row list is empty" );
      std::set<std::string> labels;
      for ( auto const& r : t["rows"] )
      {
        ts.rows.push_back( parse_row( r, ts.id ) );
        if ( !labels.insert( ts.rows.back().label ).second )
          throw config_error( "table " + ts.id + ": duplicate row label '" + ts.rows.back().label + "'" );
      }
      cfg.tables.push_back( std::move( ts ) );
    }
  }
  catch ( json::exception const& e )
  {
    throw config_error( std::string( "config: " ) + e.what() );
  }
  return cfg;
}

experiment_config load_config( fs::path const& path )
{
  if ( !fs::exists( path ) )
    throw config_error( "config file '" + path.string() + "' does not exist" );
  return parse_config( read_text_file( path ), path.parent_path() );
}

void apply_overrides( experiment_config& cfg, config_overrides const& o )
{
  if ( o.output_dir )
    cfg.output_dir = *o.output_dir;
  if ( o.seed )
    cfg.seed = *o.seed;
  for ( auto& t : cfg.tables )
  {
    for ( auto& r : t.rows )
    {
      if ( r.attack != "sweep" )
        continue;
      if ( o.mode )
        r.mode = *o.mode;
      if ( o.hold )
      {
        r.hold = *o.hold;
        r.ssat_hold = false;
      }
    }
  }
}

std::string cell_id::report_name() const
{
  return table + "__" + benchmark + "__" + label + "__k" + std::to_string( n_key ) + "__c" + std::to_string( n_c ) +
         "__r" + std::to_string( round ) + ".report.json";
}

namespace
{

locked_netlist lock_cell( netlist const& host, row_spec const& row, unsigned n_key, unsigned n_c, uint64_t seed )
{
  locked_netlist locked;
  switch ( row.kind )
  {
  case scheme::ll:
    return lock_ll( host, n_key, seed );
  case scheme::sarlock:
    locked = lock_sarlock( host, n_key, random_key( n_key, seed ) );
    break;
  case scheme::rsat:
    locked = lock_rsat( host, n_key, random_key( n_key, seed ) );
    break;
  case scheme::csar:
    locked = lock_csar( host, n_key, random_key( n_key, seed ), n_c );
    break;
  }
  locked.seed = seed;
  return locked;
}

std::string overhead_json( locked_netlist const& locked, overhead_report const& r )
{
  nlohmann::ordered_json j;
  j["kind"] = "overhead";
  j["scheme"] = scheme_name( locked.kind );
  j["n_key"] = locked.n_key;
  j["n_c"] = locked.n_c;
  j["seed"] = locked.seed;
  j["baseline_gates"] = r.baseline.total_gates;
  j["locked_gates"] = r.locked.total_gates;
  j["delta_total"] = r.delta_total;
  j["delta_jj"] = r.delta_jj;
  auto& d = j["delta_counts"] = nlohmann::ordered_json::object();
  for ( auto const& [k, v] : r.delta_counts )
    d[std::string( keyword( k ) )] = v;
  return j.dump( 2 ) + "\n";
}

} // namespace

cell_result run_cell( experiment_config const& cfg, table_spec const& table, fs::path const& bench, row_spec const& row,
                      unsigned n_key, unsigned n_c, unsigned round, fs::path const& out_dir )
{
  cell_result res;
  res.id = { table.id, bench_name( bench ), row.label, n_key, n_c, round };
  auto const seed = derive_seed( cfg.seed, round );
  std::string report;
  try
  {
    auto const host = path_balance( read_bench_file( bench ) );
    auto const locked = lock_cell( host, row, n_key, n_c, seed );
    if ( row.attack == "none" )
    {
      report = overhead_json( locked, overhead( host, locked.ntk, cfg.costs ) );
    }
    else
    {
      oracle o( locked );
      attack_report ar;
      if ( row.attack == "miter" )
      {
        ar = miter_sat_attack( locked, o );
      }
      else
      {
        sweep_options so;
        so.mode = row.mode;
        so.hold = row.ssat_hold ? n_c + 1 : row.hold;
        so.seed = seed;
        ar = sweep_attack( locked, o, so );
      }
      report = report_to_json( ar );
    }
    res.value = cell_value_from_report( report, row.metric );
  }
  catch ( std::exception const& e )
  {
    res.value = "error";
    res.error = e.what();
    nlohmann::ordered_json j;
    j["error"] = e.what();
    report = j.dump( 2 ) + "\n";
  }
  if ( !out_dir.empty() )
  {
    write_text_file( out_dir / res.id.report_name(), report );
  }
  return res;
}

std::string cell_value_from_report( std::string const& report_json, std::string const& metric )
{
  auto const j = json::parse( report_json );
  if ( j.contains( "error" ) )
    return "error";
  if ( metric == "gates" )
    return std::to_string( j.at( "delta_total" ).get<long long>() );
  if ( metric == "jj" )
    return format_number( j.at( "delta_jj" ).get<double>() );
  if ( j.at( "status" ).get<std::string>() != "KeyRecovered" )
    return "x";
  return std::to_string( j.at( "n_clk" ).get<uint64_t>() );
}

std::string emit_table( table_spec const& table, std::vector<cell_result> const& cells )
{
  std::map<std::tuple<std::string, std::string, unsigned, unsigned, unsigned>, std::string> by_key;
  for ( auto const& c : cells )
  {
    if ( c.id.table == table.id )
      by_key[{ c.id.benchmark, c.id.label, c.id.n_key, c.id.n_c, c.id.round }] = c.value;
  }
  auto get = [&]( std::string const& b, row_spec const& r, unsigned k, unsigned c, unsigned round ) {
    auto it = by_key.find( { b, r.label, k, c, round } );
    if ( it == by_key.end() )
    {
      throw error( "table " + table.id + ": missing cell " +
                   cell_id{ table.id, b, r.label, k, c, round }.report_name() );
    }
    return it->second;
  };

  std::ostringstream os;
  if ( table.id == "T2" )
  {
    unsigned rounds = 0;
    for ( auto const& r : table.rows )
      rounds = std::max( rounds, r.rounds );
    os << "benchmark,NL";
    for ( unsigned i = 1; i <= rounds; ++i )
      os << ",R" << i;
    os << ",avg\n";
    for ( auto const& bp : table.benchmarks )
    {
      auto const b = bench_name( bp );
      for ( auto const& r : table.rows )
      {
        for ( auto k : r.n_key )
        {
          for ( auto c : r.n_c )
          {
            os << b << "," << r.label;
            std::vector<std::string> vals;
            for ( unsigned i = 0; i < r.rounds; ++i )
              vals.push_back( get( b, r, k, c, i ) );
            for ( unsigned i = 0; i < rounds; ++i )
              os << "," << ( i < vals.size() ? vals[i] : "" );
            os << "," << average( vals ) << "\n";
          }
        }
      }
    }
    return os.str();
  }

  os << "benchmark";
  for ( auto const& r : table.rows )
    for ( auto k : r.n_key )
      for ( auto c : r.n_c )
        os << "," << column_name( r, k, c );
  os << "\n";
  for ( auto const& bp : table.benchmarks )
  {
    auto const b = bench_name( bp );
    os << b;
    for ( auto const& r : table.rows )
    {
      for ( auto k : r.n_key )
      {
        for ( auto c : r.n_c )
        {
          std::vector<std::string> vals;
          for ( unsigned i = 0; i < r.rounds; ++i )
            vals.push_back( get( b, r, k, c, i ) );
          os << "," << ( vals.size() == 1 ? vals.front() : average( vals ) );
        }
      }
    }
    os << "\n";
  }
  return os.str();
}

namespace
{

struct job
{
  table_spec const* table;
  fs::path bench;
  row_spec const* row;
  unsigned n_key, n_c, round;
};

std::vector<job> grid( experiment_config const& cfg )
{
  std::vector<job> jobs;
  for ( auto const& t : cfg.tables )
    for ( auto const& b : t.benchmarks )
      for ( auto const& r : t.rows )
        for ( auto k : r.n_key )
          for ( auto c : r.n_c )
            for ( unsigned i = 0; i < r.rounds; ++i )
              jobs.push_back( { &t, b, &r, k, c, i } );
  return jobs;
}

} // namespace

run_summary run_experiment( experiment_config const& cfg, unsigned jobs )
{
  auto const work = grid( cfg );
  fs::create_directories( cfg.output_dir );

  run_summary summary;
  summary.cells.resize( work.size() );
  std::atomic<std::size_t> next{ 0 };
  auto worker = [&] {
    for ( std::size_t i; ( i = next++ ) < work.size(); )
    {
      auto const& w = work[i];
      summary.cells[i] = run_cell( cfg, *w.table, w.bench, *w.row, w.n_key, w.n_c, w.round, cfg.output_dir );
    }
  };
  jobs = std::max( 1u, jobs );
  {
    std::vector<std::jthread> pool;
    for ( unsigned t = 1; t < jobs; ++t )
      pool.emplace_back( worker );
    worker();
  }

  for ( auto const& c : summary.cells )
    if ( c.value == "error" )
      ++summary.failed_cells;
  for ( auto const& t : cfg.tables )
  {
    auto const path = cfg.output_dir / ( t.id + ".csv" );
    write_text_file( path, emit_table( t, summary.cells ) );
    summary.csv_files.push_back( path );
  }
  return summary;
}

std::vector<std::string> audit( experiment_config const& cfg )
{
  std::vector<std::string> problems;
  std::vector<cell_result> cells;
  for ( auto const& w : grid( cfg ) )
  {
    cell_result c;
    c.id = { w.table->id, bench_name( w.bench ), w.row->label, w.n_key, w.n_c, w.round };
    auto const path = cfg.output_dir / c.id.report_name();
    if ( !fs::exists( path ) )
    {
      problems.push_back( "missing report " + path.string() );
      continue;
    }
    auto const text = read_text_file( path );
    try
    {
      c.value = cell_value_from_report( text, w.row->metric );
      if ( w.row->attack == "sweep" && c.value != "error" )
      {
        auto const r = report_from_json( text );
        if ( r.traced_cycles() != r.n_clk )
          problems.push_back( path.filename().string() + ": n_clk " + std::to_string( r.n_clk ) +
                              " differs from the traced cycle count " + std::to_string( r.traced_cycles() ) );
      }
    }
    catch ( std::exception const& e )
    {
      problems.push_back( path.filename().string() + ": unreadable report (" + e.what() + ")" );
      continue;
    }
    cells.push_back( std::move( c ) );
  }
  if ( !problems.empty() )
    return problems;

  for ( auto const& t : cfg.tables )
  {
    auto const path = cfg.output_dir / ( t.id + ".csv" );
    if ( !fs::exists( path ) )
    {
      problems.push_back( "missing table " + path.string() );
      continue;
    }
    if ( read_text_file( path ) != emit_table( t, cells ) )
      problems.push_back( path.filename().string() + " does not match its reports" );
  }
  return problems;
}

} // namespace rsfqlock
