#include <rsfqlock/sat_solver.hpp>

#include <algorithm>
#include <stdexcept>

namespace rsfqlock
{

namespace
{

/* 1, 1, 2, 1, 1, 2, 4, ... */
uint64_t luby( uint64_t i )
{
  uint64_t size = 1, seq = 0;
  while ( size < i + 1 )
  {
    ++seq;
    size = 2 * size + 1;
  }
  while ( size - 1 != i )
  {
    size = ( size - 1 ) >> 1;
    --seq;
    i %= size;
  }
  return uint64_t{ 1 } << seq;
}

constexpr uint32_t restart_unit = 100;

} // namespace

cdcl_solver::cdcl_solver( cnf const& f )
{
  add_formula( f );
}

void cdcl_solver::add_formula( cnf const& f )
{
  grow( static_cast<uint32_t>( f.num_vars ) );
  for ( auto const& c : f.clauses )
    add_clause( c );
}

void cdcl_solver::grow( uint32_t vars )
{
  while ( assigns_.size() < vars )
  {
    auto const v = static_cast<uint32_t>( assigns_.size() );
    assigns_.push_back( 2 );
    levels_.push_back( 0 );
    reasons_.push_back( -1 );
    activity_.push_back( 0.0 );
    seen_.push_back( 0 );
    heap_pos_.push_back( -1 );
    watches_.emplace_back();
    watches_.emplace_back();
    heap_insert( v );
  }
}

int cdcl_solver::new_var()
{
  grow( static_cast<uint32_t>( assigns_.size() + 1 ) );
  return static_cast<int>( assigns_.size() );
}

void cdcl_solver::add_clause( std::span<literal const> clause )
{
  backtrack( 0 );
  original_.emplace_back( clause.begin(), clause.end() );

  std::vector<lit> c;
  for ( auto l : clause )
  {
    if ( l == 0 )
    {
      throw error( "literal 0 in clause" );
    }
    grow( static_cast<uint32_t>( std::abs( l ) ) );
    c.push_back( encode( l ) );
  }
  if ( !ok_ )
    return;

  std::sort( c.begin(), c.end() );
  c.erase( std::unique( c.begin(), c.end() ), c.end() );
  std::vector<lit> kept;
  for ( std::size_t i = 0; i < c.size(); ++i )
  {
    if ( i + 1 < c.size() && c[i + 1] == ( c[i] ^ 1u ) )
      return; /* tautology */
    auto const v = value( c[i] );
    if ( v == 1 )
      return; /* satisfied at level 0 */
    if ( v == 2 )
      kept.push_back( c[i] );
  }

  if ( kept.empty() )
  {
    ok_ = false;
    return;
  }
  if ( kept.size() == 1 )
  {
    enqueue( kept[0], -1 );
    if ( propagate() != -1 )
      ok_ = false;
    return;
  }
  clauses_.push_back( std::move( kept ) );
  attach( static_cast<uint32_t>( clauses_.size() - 1 ) );
  ++num_original_;
}

void cdcl_solver::attach( uint32_t cref )
{
  auto const& c = clauses_[cref];
  watches_[c[0]].push_back( cref );
  watches_[c[1]].push_back( cref );
}

void cdcl_solver::enqueue( lit l, int32_t reason )
{
  auto const v = var_of( l );
  assigns_[v] = static_cast<uint8_t>( ( l & 1u ) ^ 1u );
  levels_[v] = level();
  reasons_[v] = reason;
  trail_.push_back( l );
}

int32_t cdcl_solver::propagate()
{
  while ( qhead_ < trail_.size() )
  {
    auto const falsified = trail_[qhead_++] ^ 1u;
    auto& ws = watches_[falsified];
    std::size_t i = 0, j = 0;
    while ( i < ws.size() )
    {
      auto const cref = ws[i++];
      auto& c = clauses_[cref];
      if ( c[0] == falsified )
        std::swap( c[0], c[1] );
      if ( value( c[0] ) == 1 )
      {
        ws[j++] = cref;
        continue;
      }
      bool moved = false;
      for ( std::size_t k = 2; k < c.size(); ++k )
      {
        if ( value( c[k] ) != 0 )
        {
          std::swap( c[1], c[k] );
          watches_[c[1]].push_back( cref );
          moved = true;
          break;
        }
      }
      if ( moved )
        continue;
      ws[j++] = cref;
      if ( value( c[0] ) == 0 )
      {
        while ( i < ws.size() )
          ws[j++] = ws[i++];
        ws.resize( j );
        qhead_ = trail_.size();
        return static_cast<int32_t>( cref );
      }
      ++stats_.propagations;
      enqueue( c[0], static_cast<int32_t>( cref ) );
    }
    ws.resize( j );
  }
  return -1;
}

void cdcl_solver::analyze( int32_t conflict, std::vector<lit>& learnt, uint32_t& back_level )
{
  learnt.assign( 1, 0 );
  uint32_t pending = 0;
  bool first = true;
  lit p = 0;
  auto idx = trail_.size();
  auto cref = conflict;

  do
  {
    auto const& c = clauses_[static_cast<std::size_t>( cref )];
    for ( std::size_t k = first ? 0 : 1; k < c.size(); ++k )
    {
      auto const q = c[k];
      auto const v = var_of( q );
      if ( seen_[v] || levels_[v] == 0 )
        continue;
      seen_[v] = 1;
      bump( v );
      if ( levels_[v] >= level() )
        ++pending;
      else
        learnt.push_back( q );
    }
    first = false;
    while ( !seen_[var_of( trail_[--idx] )] )
    {
    }
    p = trail_[idx];
    cref = reasons_[var_of( p )];
    seen_[var_of( p )] = 0;
    --pending;
  } while ( pending > 0 );
  learnt[0] = p ^ 1u;

  back_level = 0;
  std::size_t max_i = 1;
  for ( std::size_t i = 1; i < learnt.size(); ++i )
  {
    auto const l = levels_[var_of( learnt[i] )];
    if ( l > back_level )
    {
      back_level = l;
      max_i = i;
    }
  }
  if ( learnt.size() > 1 )
    std::swap( learnt[1], learnt[max_i] );
  for ( auto l : learnt )
    seen_[var_of( l )] = 0;
}

void cdcl_solver::backtrack( uint32_t lvl )
{
  if ( level() <= lvl )
    return;
  for ( auto i = trail_.size(); i > trail_lim_[lvl]; --i )
  {
    auto const v = var_of( trail_[i - 1] );
    assigns_[v] = 2;
    reasons_[v] = -1;
    if ( heap_pos_[v] < 0 )
      heap_insert( v );
  }
  trail_.resize( trail_lim_[lvl] );
  trail_lim_.resize( lvl );
  qhead_ = trail_.size();
}

void cdcl_solver::bump( uint32_t var )
{
  activity_[var] += inc_;
  if ( activity_[var] > 1e100 )
  {
    for ( auto& a : activity_ )
      a *= 1e-100;
    inc_ *= 1e-100;
  }
  if ( heap_pos_[var] >= 0 )
    heap_up( static_cast<std::size_t>( heap_pos_[var] ) );
}

bool cdcl_solver::heap_less( uint32_t a, uint32_t b ) const
{
  /* "a before b" */
  return activity_[a] > activity_[b] || ( activity_[a] == activity_[b] && a < b );
}

void cdcl_solver::heap_up( std::size_t i )
{
  auto const v = heap_[i];
  while ( i > 0 )
  {
    auto const parent = ( i - 1 ) / 2;
    if ( !heap_less( v, heap_[parent] ) )
      break;
    heap_[i] = heap_[parent];
    heap_pos_[heap_[i]] = static_cast<int32_t>( i );
    i = parent;
  }
  heap_[i] = v;
  heap_pos_[v] = static_cast<int32_t>( i );
}

void cdcl_solver::heap_down( std::size_t i )
{
  auto const v = heap_[i];
  while ( true )
  {
    auto child = 2 * i + 1;
    if ( child >= heap_.size() )
      break;
    if ( child + 1 < heap_.size() && heap_less( heap_[child + 1], heap_[child] ) )
      ++child;
    if ( !heap_less( heap_[child], v ) )
      break;
    heap_[i] = heap_[child];
    heap_pos_[heap_[i]] = static_cast<int32_t>( i );
    i = child;
  }
  heap_[i] = v;
  heap_pos_[v] = static_cast<int32_t>( i );
}

void cdcl_solver::heap_insert( uint32_t var )
{
  heap_.push_back( var );
  heap_pos_[var] = static_cast<int32_t>( heap_.size() - 1 );
  heap_up( heap_.size() - 1 );
}

uint32_t cdcl_solver::heap_pop()
{
  auto const top = heap_.front();
  heap_pos_[top] = -1;
  auto const last = heap_.back();
  heap_.pop_back();
  if ( !heap_.empty() )
  {
    heap_[0] = last;
    heap_pos_[last] = 0;
    heap_down( 0 );
  }
  return top;
}

sat_result cdcl_solver::solve( std::span<literal const> assumptions )
{
  sat_result result;
  backtrack( 0 );
  std::vector<lit> assume;
  for ( auto a : assumptions )
  {
    grow( static_cast<uint32_t>( std::abs( a ) ) );
    assume.push_back( encode( a ) );
  }

  auto finish = [&]( sat_status s ) {
    result.status = s;
    result.stats = stats_;
    backtrack( 0 );
    return result;
  };
  if ( !ok_ )
    return finish( sat_status::unsat );

  uint64_t const start_conflicts = stats_.conflicts;
  uint64_t restart_count = 0;
  uint64_t since_restart = 0;
  std::vector<lit> learnt;

  while ( true )
  {
    auto const conflict = propagate();
    if ( conflict != -1 )
    {
      ++stats_.conflicts;
      ++since_restart;
      if ( level() == 0 )
      {
        ok_ = false;
        return finish( sat_status::unsat );
      }
      uint32_t back_level = 0;
      analyze( conflict, learnt, back_level );
      backtrack( back_level );
      if ( learnt.size() == 1 )
      {
        enqueue( learnt[0], -1 );
      }
      else
      {
        clauses_.push_back( learnt );
        auto const cref = static_cast<uint32_t>( clauses_.size() - 1 );
        attach( cref );
        enqueue( learnt[0], static_cast<int32_t>( cref ) );
      }
      inc_ /= 0.95;

      if ( budget_ != 0 && stats_.conflicts - start_conflicts >= budget_ )
        return finish( sat_status::unknown );
      if ( since_restart >= luby( restart_count ) * restart_unit )
      {
        ++restart_count;
        ++stats_.restarts;
        since_restart = 0;
        backtrack( 0 );
      }
      continue;
    }

    std::optional<lit> next;
    while ( level() < assume.size() )
    {
      auto const a = assume[level()];
      auto const v = value( a );
      if ( v == 1 )
      {
        trail_lim_.push_back( trail_.size() );
      }
      else if ( v == 0 )
      {
        return finish( sat_status::unsat );
      }
      else
      {
        next = a;
        break;
      }
    }

    if ( !next )
    {
      while ( !heap_.empty() && assigns_[heap_.front()] != 2 )
        heap_pop();
      if ( heap_.empty() )
      {
        result.model.resize( assigns_.size() );
        for ( std::size_t v = 0; v < assigns_.size(); ++v )
          result.model[v] = assigns_[v] == 1;
        for ( auto const& c : original_ )
        {
          if ( std::none_of( c.begin(), c.end(), [&]( literal l ) { return result.value( l ); } ) )
            throw std::logic_error( "SAT model violates an input clause" );
        }
        return finish( sat_status::sat );
      }
      next = 2u * heap_pop() + 1u; /* negative phase */
    }

    ++stats_.decisions;
    trail_lim_.push_back( trail_.size() );
    enqueue( *next, -1 );
  }
}

sat_result solve( cnf const& f, std::span<literal const> assumptions )
{
  cdcl_solver s( f );
  auto r = s.solve( assumptions );
  if ( r.status == sat_status::sat )
  {
    r.model.resize( static_cast<std::size_t>( f.num_vars ) );
  }
  return r;
}

bool check_model( cnf const& f, std::vector<bool> const& model )
{
  for ( auto const& c : f.clauses )
  {
    bool sat = false;
    for ( auto l : c )
    {
      auto const v = static_cast<std::size_t>( std::abs( l ) - 1 );
      if ( v < model.size() && model[v] == ( l > 0 ) )
      {
        sat = true;
        break;
      }
    }
    if ( !sat )
      return false;
  }
  return true;
}

} // namespace rsfqlock
