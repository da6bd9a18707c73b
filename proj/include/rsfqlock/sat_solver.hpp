/*!
  \file sat_solver.hpp
  \brief Deterministic CDCL solver with assumptions

  Two watched literals, first-UIP learning, activity-based branching with ties
  broken towards the lowest variable, negative default phase and Luby restarts.
  No clause deletion: the formulas produced by the attacks stay small.
*/

#pragma once

#include "cnf.hpp"

#include <cstdint>
#include <cstdlib>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace rsfqlock
{

enum class sat_status
{
  sat,
  unsat,
  unknown /* conflict budget exhausted */
};

struct sat_stats
{
  uint64_t decisions = 0;
  uint64_t propagations = 0;
  uint64_t conflicts = 0;
  uint64_t restarts = 0;
};

struct sat_result
{
  sat_status status = sat_status::unknown;
  std::vector<bool> model; /* model[v - 1] for variable v, present iff SAT */
  sat_stats stats;

  bool value( literal l ) const { return model.at( std::abs( l ) - 1 ) == ( l > 0 ); }
};

/*! \brief Interface through which the attacks talk to a solver. */
class solver_backend
{
public:
  virtual ~solver_backend() = default;

  virtual int new_var() = 0;
  virtual int num_vars() const = 0;
  virtual void add_clause( std::span<literal const> clause ) = 0;
  virtual sat_result solve( std::span<literal const> assumptions = {} ) = 0;
};

class cdcl_solver final : public solver_backend
{
public:
  cdcl_solver() = default;
  explicit cdcl_solver( cnf const& f );

  int new_var() override;
  int num_vars() const override { return static_cast<int>( assigns_.size() ); }
  void add_clause( std::span<literal const> clause ) override;
  void add_formula( cnf const& f );

  /*! \brief Solves under assumptions; the clause database only grows by implied clauses. */
  sat_result solve( std::span<literal const> assumptions = {} ) override;

  /*! \brief 0 means unlimited. */
  void set_conflict_budget( uint64_t conflicts ) { budget_ = conflicts; }

private:
  using lit = uint32_t; /* 2 * (var - 1) + sign */

  static lit encode( literal l ) { return 2u * static_cast<uint32_t>( std::abs( l ) - 1 ) + ( l < 0 ? 1u : 0u ); }
  static uint32_t var_of( lit l ) { return l >> 1; }

  /* 0 false, 1 true, 2 unassigned */
  uint8_t value( lit l ) const
  {
    auto const a = assigns_[var_of( l )];
    return a == 2 ? 2 : static_cast<uint8_t>( a ^ ( l & 1u ) );
  }

  void grow( uint32_t vars );
  void attach( uint32_t cref );
  void enqueue( lit l, int32_t reason );
  int32_t propagate();
  void analyze( int32_t conflict, std::vector<lit>& learnt, uint32_t& back_level );
  void backtrack( uint32_t level );
  void bump( uint32_t var );
  uint32_t level() const { return static_cast<uint32_t>( trail_lim_.size() ); }

  /* activity heap */
  bool heap_less( uint32_t a, uint32_t b ) const;
  void heap_up( std::size_t i );
  void heap_down( std::size_t i );
  void heap_insert( uint32_t var );
  uint32_t heap_pop();

  std::vector<std::vector<lit>> clauses_;
  std::size_t num_original_ = 0;
  std::vector<std::vector<uint32_t>> watches_; /* per literal: clauses watching its negation becoming false */
  std::vector<uint8_t> assigns_;
  std::vector<uint32_t> levels_;
  std::vector<int32_t> reasons_;
  std::vector<double> activity_;
  std::vector<uint8_t> seen_;
  std::vector<lit> trail_;
  std::vector<std::size_t> trail_lim_;
  std::size_t qhead_ = 0;
  std::vector<uint32_t> heap_;
  std::vector<int32_t> heap_pos_;
  double inc_ = 1.0;
  bool ok_ = true;
  uint64_t budget_ = 0;
  sat_stats stats_;
  std::vector<std::vector<literal>> original_; /* kept verbatim for model checking */
};

/*! \brief One-shot solve of `f`; SAT models are checked against every clause. */
sat_result solve( cnf const& f, std::span<literal const> assumptions = {} );

/*! \brief True iff `model` satisfies every clause of `f`. */
bool check_model( cnf const& f, std::vector<bool> const& model );

} // namespace rsfqlock
