#ifndef CONFORM_H
#define CONFORM_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define CONFORM_API __declspec(dllexport)
#else
#define CONFORM_API __attribute__((visibility("default")))
#endif

/* Status codes; also the CLI exit codes. */
typedef enum {
  CONFORM_OK = 0,
  CONFORM_ECONFIG = 1,
  CONFORM_EDEGENERATE = 2,
  CONFORM_ENUMERICS = 3
} conform_status;

typedef enum { CONFORM_TRIG = 0, CONFORM_POWER = 1, CONFORM_TIME_POWER = 2 } conform_family;

typedef struct conform_run conform_run;
typedef struct conform_expr conform_expr;

typedef struct {
  double tol;  /* > 0 overrides numerics.tol */
  size_t grid; /* > 0 overrides numerics.grid */
} conform_options;

CONFORM_API const char* conform_version(void);

/* Message of the last failed call on this thread; "" when none. */
CONFORM_API const char* conform_last_error(void);

/* Runs a config file (flat or an emitted JSON report). *out is set even on
   failure so the diagnostic and partial report can be read. */
CONFORM_API int conform_run_file(const char* path, const conform_options* opt, conform_run** out);
CONFORM_API int conform_run_text(const char* text, const conform_options* opt, conform_run** out);

CONFORM_API int conform_run_status(const conform_run* run);
CONFORM_API const char* conform_run_message(const conform_run* run);
CONFORM_API const char* conform_run_report(const conform_run* run); /* JSON, "" on config errors */
CONFORM_API size_t conform_run_rows(const conform_run* run);
/* row[0..3] = t, x, dax, residual */
CONFORM_API int conform_run_row(const conform_run* run, size_t i, double row[4]);
CONFORM_API int conform_run_write(const conform_run* run, const char* dir);
CONFORM_API void conform_run_free(conform_run* run);

/* err_offset receives the byte offset of a syntax error. */
CONFORM_API int conform_expr_parse(const char* text, conform_expr** out, size_t* err_offset);
CONFORM_API int conform_expr_eval(const conform_expr* e, double t, double* value, double* deriv);
CONFORM_API void conform_expr_free(conform_expr* e);

/* omega is ignored by trig and must be positive for the other families. */
CONFORM_API int conform_e0(conform_family family, double alpha, double omega, double t, double s, double* out);
CONFORM_API int conform_h1(conform_family family, double alpha, double omega, double t, double a, double* out);
CONFORM_API int conform_pi_star(conform_family family, double alpha, double omega, double target, double* out);

#ifdef __cplusplus
}
#endif

#endif
