#ifndef BSRES_H
#define BSRES_H

#include <stddef.h>

#if defined(_WIN32)
#  if defined(BSRES_BUILDING)
#    define BSRES_API __declspec(dllexport)
#  else
#    define BSRES_API __declspec(dllimport)
#  endif
#else
#  define BSRES_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. The CLI exit code is the status, with BSRES_E_IO and
   BSRES_E_INTERNAL folded into 1. */
typedef enum {
    BSRES_OK = 0,
    BSRES_E_INVALID = 1,      /* bad argument or value outside the method's domain */
    BSRES_E_VALIDATION = 2,   /* hypothesis / config / flavor rejected */
    BSRES_E_NUMERICAL = 3,    /* quadrature, subdivision or truncation budget */
    BSRES_E_CHECK_FAILED = 4, /* a mathematical check did not hold */
    BSRES_E_IO = 5,
    BSRES_E_INTERNAL = 6
} bsres_status;

typedef struct bsres_config bsres_config;
typedef struct bsres_result bsres_result;

BSRES_API const char* bsres_version(void);

/* Message of the last failing call on this thread ("" if none). */
BSRES_API const char* bsres_last_error(void);

/* Caps BLAS threads; the library itself is single-threaded. */
BSRES_API int bsres_set_threads(int n);

BSRES_API int bsres_config_load(const char* path, bsres_config** out);
BSRES_API int bsres_config_parse(const char* text, bsres_config** out);
BSRES_API int bsres_config_set(bsres_config* cfg, const char* key, const char* value);
/* Returned string is released with bsres_string_free. */
BSRES_API int bsres_config_serialize(const bsres_config* cfg, char** out);
BSRES_API void bsres_config_free(bsres_config* cfg);

/* Each run fills a result holding a JSON report and a pass flag. */
BSRES_API int bsres_validate(const bsres_config* cfg, bsres_result** out);
BSRES_API int bsres_run_toeplitz(const bsres_config* cfg, bsres_result** out);
BSRES_API int bsres_run_resonances(const bsres_config* cfg, bsres_result** out);
BSRES_API int bsres_emit_plots(const char* dir, double sector_theta, bsres_result** out);
BSRES_API int bsres_report(const char* dir, bsres_result** out);

BSRES_API const char* bsres_result_json(const bsres_result* r);
BSRES_API int bsres_result_holds(const bsres_result* r);
BSRES_API void bsres_result_free(bsres_result* r);
BSRES_API void bsres_string_free(char* s);

/* Small direct entry points. flavor: "pauli", "dirac_plus", "dirac_minus". */
BSRES_API int bsres_spectral_map(const char* flavor, double m, double k_re, double k_im, double* z_re,
                                 double* z_im);
BSRES_API int bsres_landau_dei(double b0, double t, double* out);
BSRES_API int bsres_counting(const double* eigenvalues, size_t n, double s, int* out);

#ifdef __cplusplus
}
#endif

#endif
