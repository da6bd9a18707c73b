#include <rsfqlock/attack.hpp>
#include <rsfqlock/bench_io.hpp>
#include <rsfqlock/harness.hpp>
#include <rsfqlock/locking.hpp>
#include <rsfqlock/pipeline.hpp>
#include <rsfqlock/random.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace rsfqlock;

namespace
{

constexpr int exit_ok = 0;
constexpr int exit_failure = 1;
constexpr int exit_config = 2;

void emit( std::optional<fs::path> const& out, std::string const& text )
{
  if ( out )
    write_text_file( *out, text );
  else
    std::cout << text;
}

locked_netlist load_locked( fs::path const& bench, std::optional<fs::path> sidecar )
{
  auto const side = sidecar ? *sidecar : fs::path( bench.string() + ".json" );
  return locked_from_sidecar( read_bench_file( bench ), read_text_file( side ) );
}

std::string summary( netlist const& ntk )
{
  std::ostringstream os;
  auto const area = area_stats( ntk );
  os << "inputs " << ntk.num_inputs() << "\n"
     << "key_inputs " << ntk.num_key_inputs() << "\n"
     << "outputs " << ntk.num_outputs() << "\n"
     << "gates " << area.total_gates << "\n"
     << "unbalanced " << unbalanced_gates( ntk ).size() << "\n";
  auto const depths = sequential_depths( ntk );
  unsigned max_depth = 0;
  for ( auto o : ntk.outputs() )
    max_depth = std::max( max_depth, depths[o] );
  os << "max_output_depth " << max_depth << "\n";
  return os.str();
}

} // namespace

int main( int argc, char** argv )
{
  CLI::App app{ "Locking, attacking and measuring gate-level pipelined netlists" };
  app.require_subcommand( 1 );

  /* parse */
  fs::path parse_in;
  std::optional<fs::path> parse_out;
  bool parse_balance = false;
  auto* parse = app.add_subcommand( "parse", "Validate a BENCH file and print its statistics" );
  parse->add_option( "bench", parse_in, "BENCH netlist" )->required()->check( CLI::ExistingFile );
  parse->add_option( "--out", parse_out, "Write the (optionally balanced) netlist here" );
  parse->add_flag( "--balance", parse_balance, "Insert path-balancing DFFs" );

  /* lock */
  fs::path lock_in, lock_out;
  std::string lock_scheme;
  unsigned lock_n_key = 0, lock_n_c = 1;
  uint64_t lock_seed = 0;
  std::optional<std::string> lock_key;
  auto* lock = app.add_subcommand( "lock", "Lock a netlist; writes BENCH plus a JSON sidecar" );
  lock->add_option( "bench", lock_in, "Host BENCH netlist" )->required()->check( CLI::ExistingFile );
  lock->add_option( "--scheme", lock_scheme, "LL, SARLock, RSAT or CSAR" )->required();
  lock->add_option( "--n-key", lock_n_key, "Number of key bits" )->required();
  lock->add_option( "--n-c", lock_n_c, "Camouflaged DFFs (CSAR)" );
  lock->add_option( "--seed", lock_seed, "Seed for key and placement" );
  lock->add_option( "--key", lock_key, "Correct key as a bit string (comparator schemes)" );
  lock->add_option( "--out", lock_out, "Locked BENCH output; sidecar goes to <out>.json" )->required();

  /* simulate */
  fs::path sim_in;
  std::vector<std::string> sim_patterns;
  std::string sim_key;
  unsigned sim_hold = 1, sim_random = 0;
  uint64_t sim_seed = 0;
  std::optional<fs::path> sim_out;
  auto* sim = app.add_subcommand( "simulate", "Clocked simulation from reset; prints a CSV trace" );
  sim->add_option( "bench", sim_in, "BENCH netlist" )->required()->check( CLI::ExistingFile );
  sim->add_option( "--pattern", sim_patterns, "Input pattern bit string (repeatable)" );
  sim->add_option( "--random", sim_random, "Append this many random patterns" );
  sim->add_option( "--seed", sim_seed, "Seed for random patterns" );
  sim->add_option( "--hold", sim_hold, "Cycles per pattern" )->check( CLI::PositiveNumber );
  sim->add_option( "--key", sim_key, "Key bit string" );
  sim->add_option( "--out", sim_out, "CSV output file" );

  /* attack */
  fs::path att_in;
  std::optional<fs::path> att_sidecar, att_out;
  std::string att_kind = "sweep", att_mode = "exhaustive";
  unsigned att_hold = 1;
  uint64_t att_seed = 0, att_budget = 0;
  std::vector<std::string> att_dips;
  auto* att = app.add_subcommand( "attack", "Attack a locked netlist against its own oracle" );
  att->add_option( "bench", att_in, "Locked BENCH netlist" )->required()->check( CLI::ExistingFile );
  att->add_option( "--sidecar", att_sidecar, "Lock sidecar (default <bench>.json)" );
  att->add_option( "--attack", att_kind, "sweep or miter" )->check( CLI::IsMember( { "sweep", "miter" } ) );
  att->add_option( "--mode", att_mode, "random or exhaustive (sweep)" )->check( CLI::IsMember( { "random", "exhaustive" } ) );
  att->add_option( "--hold", att_hold, "Cycles per pattern (sweep)" )->check( CLI::PositiveNumber );
  att->add_option( "--seed", att_seed, "Pattern order seed (random sweep)" );
  att->add_option( "--budget", att_budget, "Pattern or iteration budget, 0 for default" );
  att->add_option( "--dip", att_dips, "Scripted distinguishing input (miter, repeatable)" );
  att->add_option( "--out", att_out, "Report JSON output" );

  /* bench */
  fs::path cfg_path;
  config_overrides ov;
  std::optional<std::string> ov_mode;
  unsigned jobs = 1;
  auto add_config_flags = [&]( CLI::App* sc ) {
    sc->add_option( "--config", cfg_path, "Experiment config (JSON)" )->required();
    sc->add_option( "--out", ov.output_dir, "Output directory override" );
    sc->add_option( "--seed", ov.seed, "Seed override" );
    sc->add_option( "--mode", ov_mode, "Sweep mode override" )->check( CLI::IsMember( { "random", "exhaustive" } ) );
    sc->add_option( "--hold", ov.hold, "Sweep hold override" )->check( CLI::PositiveNumber );
  };
  auto* bench = app.add_subcommand( "bench", "Run an experiment grid and emit its tables" );
  add_config_flags( bench );
  bench->add_option( "--jobs", jobs, "Parallel grid cells" )->check( CLI::PositiveNumber );

  /* stats */
  fs::path stats_in;
  std::optional<fs::path> stats_baseline, stats_costs;
  auto* stats = app.add_subcommand( "stats", "Gate counts and JJ estimate, or overhead against a baseline" );
  stats->add_option( "bench", stats_in, "BENCH netlist" )->required()->check( CLI::ExistingFile );
  stats->add_option( "--baseline", stats_baseline, "Baseline netlist for overhead" )->check( CLI::ExistingFile );
  stats->add_option( "--costs", stats_costs, "JJ cost table (JSON)" )->check( CLI::ExistingFile );

  /* audit */
  auto* aud = app.add_subcommand( "audit", "Check that every CSV cell matches its persisted report" );
  add_config_flags( aud );

  try
  {
    app.parse( argc, argv );
  }
  catch ( CLI::ParseError const& e )
  {
    /* help requests exit 0, usage errors share the config exit code */
    return app.exit( e ) == 0 ? exit_ok : exit_config;
  }

  try
  {
    if ( *parse )
    {
      auto ntk = read_bench_file( parse_in );
      if ( parse_balance )
        ntk = path_balance( ntk );
      std::cout << summary( ntk );
      if ( parse_out )
        write_bench_file( ntk, *parse_out );
      return exit_ok;
    }

    if ( *lock )
    {
      auto const host = path_balance( read_bench_file( lock_in ) );
      auto const kind = scheme_from_name( lock_scheme );
      auto const key = lock_key ? bit_vector::from_string( *lock_key ) : random_key( lock_n_key, lock_seed );
      if ( key.width() != lock_n_key )
        throw width_error( "--key has " + std::to_string( key.width() ) + " bits, --n-key is " + std::to_string( lock_n_key ) );
      locked_netlist locked;
      switch ( kind )
      {
      case scheme::ll:
        locked = lock_ll( host, lock_n_key, lock_seed );
        break;
      case scheme::sarlock:
        locked = lock_sarlock( host, lock_n_key, key );
        break;
      case scheme::rsat:
        locked = lock_rsat( host, lock_n_key, key );
        break;
      case scheme::csar:
        locked = lock_csar( host, lock_n_key, key, lock_n_c );
        break;
      }
      locked.seed = lock_seed;
      write_bench_file( locked.ntk, lock_out );
      write_text_file( lock_out.string() + ".json", sidecar_to_json( locked ) );
      std::cout << "correct_key " << locked.correct_key.to_string() << "\n";
      return exit_ok;
    }

    if ( *sim )
    {
      auto const ntk = read_bench_file( sim_in );
      auto const key = sim_key.empty() ? bit_vector( ntk.num_key_inputs() ) : bit_vector::from_string( sim_key );
      std::vector<bit_vector> patterns;
      for ( auto const& p : sim_patterns )
        patterns.push_back( bit_vector::from_string( p ) );
      rng r( sim_seed );
      for ( unsigned i = 0; i < sim_random; ++i )
      {
        bit_vector p( ntk.num_inputs() );
        for ( std::size_t b = 0; b < p.width(); ++b )
          p.set( b, r.bit() );
        patterns.push_back( p );
      }
      std::vector<stimulus> stim;
      for ( auto const& p : patterns )
        for ( unsigned h = 0; h < sim_hold; ++h )
          stim.push_back( { p, key } );
      emit( sim_out, trace_to_csv( simulate_clocked( ntk, stim ) ) );
      return exit_ok;
    }

    if ( *att )
    {
      auto const locked = load_locked( att_in, att_sidecar );
      oracle o( locked );
      attack_report report;
      if ( att_kind == "miter" )
      {
        miter_options mo;
        if ( att_budget )
          mo.budget = att_budget;
        for ( auto const& d : att_dips )
          mo.scripted_dips.push_back( bit_vector::from_string( d ) );
        report = miter_sat_attack( locked, o, mo );
      }
      else
      {
        sweep_options so;
        so.mode = mode_from_name( att_mode );
        so.hold = att_hold;
        so.seed = att_seed;
        if ( att_budget )
          so.budget = att_budget;
        report = sweep_attack( locked, o, so );
      }
      emit( att_out, report_to_json( report ) );
      std::cerr << status_name( report.status ) << " n_clk " << report.n_clk << "\n";
      return report.status == attack_status::key_recovered ? exit_ok : exit_failure;
    }

    if ( *stats )
    {
      auto const costs = stats_costs ? jj_costs_from_json( read_text_file( *stats_costs ) ) : default_jj_costs();
      auto const ntk = read_bench_file( stats_in );
      if ( stats_baseline )
      {
        auto const r = overhead( read_bench_file( *stats_baseline ), ntk, costs );
        for ( auto const& [k, v] : r.delta_counts )
          std::cout << "delta_" << keyword( k ) << " " << v << "\n";
        std::cout << "delta_total " << r.delta_total << "\n"
                  << "delta_jj " << r.delta_jj << "\n";
      }
      else
      {
        auto const r = area_stats( ntk, costs );
        for ( auto const& [k, v] : r.counts )
          std::cout << keyword( k ) << " " << v << "\n";
        std::cout << "total_gates " << r.total_gates << "\n"
                  << "jj_estimate " << r.jj_estimate << "\n";
      }
      return exit_ok;
    }

    /* bench and audit share config handling */
    experiment_config cfg;
    try
    {
      cfg = load_config( cfg_path );
      if ( ov_mode )
        ov.mode = mode_from_name( *ov_mode );
      apply_overrides( cfg, ov );
    }
    catch ( error const& e )
    {
      std::cerr << "config error: " << e.what() << "\n";
      return exit_config;
    }

    if ( *bench )
    {
      auto const s = run_experiment( cfg, jobs );
      for ( auto const& c : s.cells )
        if ( c.value == "error" )
          std::cerr << "cell " << c.id.report_name() << ": " << c.error << "\n";
      for ( auto const& p : s.csv_files )
        std::cout << p.string() << "\n";
      return s.failed_cells ? exit_failure : exit_ok;
    }

    auto const problems = audit( cfg );
    for ( auto const& p : problems )
      std::cout << p << "\n";
    if ( problems.empty() )
      std::cout << "audit ok\n";
    return problems.empty() ? exit_ok : exit_failure;
  }
  catch ( std::exception const& e )
  {
    std::cerr << "error: " << e.what() << "\n";
    return exit_failure;
  }
}
