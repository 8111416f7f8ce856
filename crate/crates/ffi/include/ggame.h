#ifndef GGAME_H
#define GGAME_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum GgStatus {
  GG_STATUS_OK = 0,
  GG_STATUS_NULL_POINTER = 1,
  GG_STATUS_DOMAIN = 2,
  GG_STATUS_SOLVER = 3,
  GG_STATUS_SINGULARITY = 4,
  GG_STATUS_CONFIG = 5,
  GG_STATUS_BUFFER_TOO_SMALL = 6,
  GG_STATUS_PANIC = 7,
} GgStatus;

// Information environment with its realized public signal.
typedef struct GgEnvironment GgEnvironment;

// Game parameters (c, α_x, α_p, σ_μ, E[μ]).
typedef struct GgParams GgParams;

// One threshold equilibrium.
typedef struct GgEquilibrium {
  double theta_star;
  double psi_star;
  // Φ⁻¹(θ*).
  double probit;
  double slope_at_root;
  bool degenerate;
} GgEquilibrium;

// Closed-form uniqueness condition `lhs ≥ threshold`.
typedef struct GgUniqueness {
  double lhs;
  double threshold;
  double margin;
  bool unique_for_all;
} GgUniqueness;

// Strategy-level uniqueness flags for the attack-revealing signal.
typedef struct GgStrategyReport {
  double dzds_max;
  double e11_lhs;
  double e12_lhs;
  bool condition_e11;
  bool condition_e12;
  bool strategies_unique;
} GgStrategyReport;

// Linear price P = η₁θ + η₂ε + intercept and the precision it reveals.
typedef struct GgMarket {
  double eta1;
  double eta2;
  double intercept;
  double alpha_z;
} GgMarket;

// Monte Carlo attack fraction against the closed form.
typedef struct GgSimulation {
  double attack_fraction_hat;
  double analytic_attack;
  double std_error;
  double psi_mean;
  double psi_variance;
  uint64_t n_agents;
  uint64_t seed;
  bool within_band;
} GgSimulation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *gg_version(void);

// Copies the last error message of this thread into `buf` (NUL-terminated, truncated
// to `len`) and returns the full message length excluding the terminator.
//
// # Safety
// `buf` must be null or valid for `len` bytes.
size_t gg_last_error_message(char *buf, size_t len);

// # Safety
// `out` must be valid for one pointer write.
enum GgStatus gg_params_new(double cost,
                            double alpha_x,
                            double alpha_p,
                            double sigma_mu,
                            double mu_mean,
                            struct GgParams **out);

// # Safety
// `params` must be null or a handle from this library not yet freed.
void gg_params_free(struct GgParams *params);

// # Safety
// `out` must be valid for one pointer write.
enum GgStatus gg_env_baseline(struct GgEnvironment **out);

// # Safety
// `out` must be valid for one pointer write.
enum GgStatus gg_env_exogenous(double alpha_z, double z, struct GgEnvironment **out);

// # Safety
// `out` must be valid for one pointer write.
enum GgStatus gg_env_market(double gamma, double sigma_eps, double z, struct GgEnvironment **out);

// # Safety
// `out` must be valid for one pointer write.
enum GgStatus gg_env_actions(double sigma_eps, double s, struct GgEnvironment **out);

// # Safety
// `env` must be null or a handle from this library not yet freed.
void gg_env_free(struct GgEnvironment *env);

// Parses a JSON game document into a parameter and an environment handle.
//
// # Safety
// `json` must be a NUL-terminated string; both out-pointers must be valid for writes.
enum GgStatus gg_game_from_json(const char *json,
                                struct GgParams **params_out,
                                struct GgEnvironment **env_out);

// Solves for all threshold equilibria, sorted by θ*.
//
// `*count` receives the number of equilibria. If it exceeds `capacity`, only the
// first `capacity` are written and `GG_STATUS_BUFFER_TOO_SMALL` is returned.
// Three slots always suffice.
//
// # Safety
// Handles must be live; `out` must be valid for `capacity` writes (or null when
// `capacity` is 0); `count` must be valid for one write.
enum GgStatus gg_solve(const struct GgParams *params,
                       const struct GgEnvironment *env,
                       struct GgEquilibrium *out,
                       size_t capacity,
                       size_t *count);

// Closed-form threshold uniqueness condition for the environment.
//
// # Safety
// Handles must be live; `out` must be valid for one write.
enum GgStatus gg_uniqueness(const struct GgParams *params,
                            const struct GgEnvironment *env,
                            struct GgUniqueness *out);

// Strategy-level uniqueness for the attack-revealing signal; the environment must
// be an actions environment.
//
// # Safety
// Handles must be live; `out` must be valid for one write.
enum GgStatus gg_strategy_uniqueness(const struct GgParams *params,
                                     const struct GgEnvironment *env,
                                     struct GgStrategyReport *out);

// Price coefficients of the CARA-normal market.
//
// # Safety
// `params` must be live; `out` must be valid for one write.
enum GgStatus gg_solve_market(const struct GgParams *params,
                              double gamma,
                              double sigma_eps,
                              struct GgMarket *out);

// Simulates `n` agents at fundamental θ using cutoff ψ*.
//
// # Safety
// `params` must be live; `out` must be valid for one write.
enum GgStatus gg_simulate_attack(const struct GgParams *params,
                                 double theta,
                                 double psi_star,
                                 uint64_t n,
                                 uint64_t seed,
                                 struct GgSimulation *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GGAME_H */
