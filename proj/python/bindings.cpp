#include <rsfqlock/attack.hpp>
#include <rsfqlock/bench_io.hpp>
#include <rsfqlock/error.hpp>
#include <rsfqlock/harness.hpp>
#include <rsfqlock/locking.hpp>
#include <rsfqlock/pipeline.hpp>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace rsfqlock;

namespace
{

bit_vector bits( std::string const& s )
{
  return bit_vector::from_string( s );
}

std::vector<std::string> strings( std::vector<bit_vector> const& v )
{
  std::vector<std::string> out;
  for ( auto const& b : v )
    out.push_back( b.to_string() );
  return out;
}

locked_netlist lock( netlist const& host, std::string const& scheme_str, unsigned n_key, uint64_t seed, unsigned n_c,
                     std::optional<std::string> const& key )
{
  auto const s = scheme_from_name( scheme_str );
  if ( s == scheme::ll )
  {
    if ( key )
      throw error( "LL draws its key from the seed" );
    return lock_ll( host, n_key, seed );
  }
  auto const k = key ? bits( *key ) : random_key( n_key, seed );
  switch ( s )
  {
  case scheme::sarlock:
    return lock_sarlock( host, n_key, k );
  case scheme::rsat:
    return lock_rsat( host, n_key, k );
  default:
    return lock_csar( host, n_key, k, n_c );
  }
}

} // namespace

PYBIND11_MODULE( _core, m )
{
  m.doc() = "RSFQ logic locking, pipelining and attack engines";

  py::register_exception<error>( m, "Error", PyExc_RuntimeError );
  py::register_exception<parse_error>( m, "ParseError", m.attr( "Error" ).ptr() );
  py::register_exception<netlist_error>( m, "NetlistError", m.attr( "Error" ).ptr() );
  py::register_exception<width_error>( m, "WidthError", m.attr( "Error" ).ptr() );
  py::register_exception<config_error>( m, "ConfigError", m.attr( "Error" ).ptr() );

  py::class_<netlist>( m, "Netlist" )
      .def_property_readonly( "num_inputs", &netlist::num_inputs )
      .def_property_readonly( "num_key_inputs", &netlist::num_key_inputs )
      .def_property_readonly( "num_outputs", &netlist::num_outputs )
      .def_property_readonly( "num_gates", []( netlist const& n ) { return area_stats( n ).total_gates; } )
      .def( "area", []( netlist const& n ) {
        auto const a = area_stats( n );
        py::dict counts;
        for ( auto const& [k, c] : a.counts )
          counts[py::str( std::string( keyword( k ) ) )] = c;
        return py::make_tuple( a.total_gates, a.jj_estimate, counts );
      } )
      .def( "to_bench", []( netlist const& n ) { return write_bench( n ); } )
      .def( "unbalanced_gates", []( netlist const& n ) { return unbalanced_gates( n ).size(); } )
      .def( "output_latency", []( netlist const& n ) { return output_latency( n ); } );

  m.def( "parse_bench", []( std::string const& text ) { return parse_bench( text ); }, py::arg( "text" ) );
  m.def( "read_bench", []( std::filesystem::path const& p ) { return read_bench_file( p ); }, py::arg( "path" ) );
  m.def( "path_balance", []( netlist const& n ) { return path_balance( n ); }, py::arg( "netlist" ) );
  m.def(
      "eval_comb",
      []( netlist const& n, std::string const& inputs, std::string const& keys ) {
        return eval_comb( n, bits( inputs ), bits( keys ) ).to_string();
      },
      py::arg( "netlist" ), py::arg( "inputs" ), py::arg( "keys" ) = "" );
  m.def(
      "simulate",
      []( netlist const& n, std::vector<std::string> const& patterns, std::string const& keys ) {
        std::vector<stimulus> st;
        for ( auto const& p : patterns )
          st.push_back( { bits( p ), bits( keys ) } );
        auto const tr = simulate_clocked( n, st );
        return py::make_tuple( strings( tr.outputs ), tr.warmup );
      },
      py::arg( "netlist" ), py::arg( "patterns" ), py::arg( "keys" ) = "",
      "Clocked simulation from reset; returns (per-cycle outputs, warm-up cycles)." );

  py::class_<locked_netlist>( m, "Locked" )
      .def_readonly( "netlist", &locked_netlist::ntk )
      .def_property_readonly( "scheme", []( locked_netlist const& l ) { return std::string( scheme_name( l.kind ) ); } )
      .def_property_readonly( "correct_key", []( locked_netlist const& l ) { return l.correct_key.to_string(); } )
      .def_readonly( "n_key", &locked_netlist::n_key )
      .def_readonly( "n_c", &locked_netlist::n_c )
      .def( "sidecar", []( locked_netlist const& l ) { return sidecar_to_json( l ); } );

  m.def( "lock", &lock, py::arg( "host" ), py::arg( "scheme" ), py::arg( "n_key" ), py::arg( "seed" ) = 0,
         py::arg( "n_c" ) = 1, py::arg( "key" ) = py::none(),
         "Locks a host netlist with LL, SARLock, RSAT or CSAR; the result is path-balanced." );

  py::class_<attack_report>( m, "AttackReport" )
      .def_property_readonly( "status", []( attack_report const& r ) { return std::string( status_name( r.status ) ); } )
      .def_property_readonly( "recovered_key", []( attack_report const& r ) -> std::optional<std::string> {
        if ( auto k = r.recovered_key() )
          return k->to_string();
        return std::nullopt;
      } )
      .def_readonly( "iterations", &attack_report::iterations )
      .def_readonly( "n_clk", &attack_report::n_clk )
      .def_property_readonly( "eliminated", []( attack_report const& r ) {
        std::vector<std::vector<std::string>> out;
        for ( auto const& t : r.trace )
          out.push_back( strings( t.eliminated ) );
        return out;
      } )
      .def( "to_json", []( attack_report const& r ) { return report_to_json( r ); } );

  m.def(
      "sweep_attack",
      []( locked_netlist const& l, std::string const& mode, unsigned hold, uint64_t seed, std::optional<uint64_t> budget ) {
        oracle o( l );
        sweep_options opts;
        opts.mode = mode_from_name( mode );
        opts.hold = hold;
        opts.seed = seed;
        opts.budget = budget;
        return sweep_attack( l, o, opts );
      },
      py::arg( "locked" ), py::arg( "mode" ) = "exhaustive", py::arg( "hold" ) = 1, py::arg( "seed" ) = 0,
      py::arg( "budget" ) = py::none() );
  m.def(
      "miter_attack",
      []( locked_netlist const& l, uint64_t budget, std::vector<std::string> const& dips ) {
        oracle o( l );
        miter_options opts;
        opts.budget = budget;
        for ( auto const& d : dips )
          opts.scripted_dips.push_back( bits( d ) );
        return miter_sat_attack( l, o, opts );
      },
      py::arg( "locked" ), py::arg( "budget" ) = 10000, py::arg( "dips" ) = std::vector<std::string>{} );

  m.def(
      "run_config",
      []( std::filesystem::path const& config, std::optional<std::filesystem::path> const& out, unsigned jobs ) {
        auto cfg = load_config( config );
        if ( out )
          cfg.output_dir = *out;
        auto const r = run_experiment( cfg, jobs );
        std::vector<std::string> csv;
        for ( auto const& p : r.csv_files )
          csv.push_back( p.string() );
        return py::make_tuple( csv, r.failed_cells );
      },
      py::arg( "config" ), py::arg( "out" ) = py::none(), py::arg( "jobs" ) = 1,
      "Runs an experiment grid; returns (csv paths, failed cell count)." );
}
