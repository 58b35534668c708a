#ifndef SYMMUS_H
#define SYMMUS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every fallible call.
typedef enum SymmusStatus {
  SYMMUS_STATUS_OK = 0,
  SYMMUS_STATUS_ERROR = 1,
  SYMMUS_STATUS_SAT = 2,
  SYMMUS_STATUS_BUDGET = 3,
  SYMMUS_STATUS_INVALID_ARGUMENT = 4,
  SYMMUS_STATUS_PANIC = 5,
} SymmusStatus;

// A symmetry group over the constraints of one specification.
typedef struct SymmusGroup SymmusGroup;

// A parsed specification.
typedef struct SymmusSpec SymmusSpec;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread; empty when none. Owned by
// the library.
const char *symmus_last_error(void);

// Parses a specification; returns null on failure.
//
// # Safety
// `text` must be null or a valid NUL-terminated string.
struct SymmusSpec *symmus_spec_parse(const char *text);

// # Safety
// `spec` must be null or a handle from [`symmus_spec_parse`] not yet freed.
void symmus_spec_free(struct SymmusSpec *spec);

// Number of constraints, or 0 for a null handle.
//
// # Safety
// `spec` must be null or a live handle.
size_t symmus_spec_num_constraints(const struct SymmusSpec *spec);

// Detects constraint symmetries; `node_budget` 0 selects the default.
//
// # Safety
// `spec` must be a live handle.
struct SymmusGroup *symmus_detect(const struct SymmusSpec *spec, uint64_t node_budget);

// Reads a group in symmetry-file format; returns null on failure.
//
// # Safety
// `spec` must be a live handle and `text` a NUL-terminated string.
struct SymmusGroup *symmus_group_parse(const struct SymmusSpec *spec, const char *text);

// Writes a group in symmetry-file format. Free with
// [`symmus_string_free`].
//
// # Safety
// Both handles must be live and belong together.
char *symmus_group_write(const struct SymmusGroup *group, const struct SymmusSpec *spec);

// Number of generators, or 0 for a null handle.
//
// # Safety
// `group` must be null or a live handle.
size_t symmus_group_num_generators(const struct SymmusGroup *group);

// # Safety
// `group` must be null or a handle not yet freed.
void symmus_group_free(struct SymmusGroup *group);

// # Safety
// `s` must be null or a string returned by this library, not yet freed.
void symmus_string_free(char *s);

// Extracts one MUS. Options: `algo` ("shrink", "symm", "symm-recompute"),
// `order` ("descending", "ascending", "random") and the common keys
// `seed`, `conflict_budget`, `time_limit`, `node_budget`,
// `negative_assumptions`, `lex_order`. A null `group` means detect.
//
// # Safety
// `spec` must be live, `group` null or live, `options` null or a
// NUL-terminated string, `out_json` writable.
enum SymmusStatus symmus_mus(const struct SymmusSpec *spec,
                             const struct SymmusGroup *group,
                             const char *options,
                             char **out_json);

// Minimum-cost unsatisfiable subset. Options: `lex`, `dynamic`,
// `mcs_cap`, `weights` (one per constraint) and the common keys.
//
// # Safety
// As for [`symmus_mus`].
enum SymmusStatus symmus_ocus(const struct SymmusSpec *spec,
                              const struct SymmusGroup *group,
                              const char *options,
                              char **out_json);

// MUS enumeration. Options: `lex`, `unroll`, `max_muses`, `shrink`
// ("plain", "symm") and the common keys.
//
// # Safety
// As for [`symmus_mus`].
enum SymmusStatus symmus_marco(const struct SymmusSpec *spec,
                               const struct SymmusGroup *group,
                               const char *options,
                               char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SYMMUS_H */
