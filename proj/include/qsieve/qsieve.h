/* C API for the qsieve library: opaque handles, status codes, no exceptions
 * across the boundary. Status codes match the CLI exit codes. */
#ifndef QSIEVE_H
#define QSIEVE_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  QSIEVE_OK = 0,
  QSIEVE_ERR = 1,         /* unexpected failure */
  QSIEVE_ERR_CONFIG = 2,  /* parse or validation error */
  QSIEVE_ERR_NUMERIC = 3, /* numeric degradation under strict mode */
  QSIEVE_ERR_IO = 4       /* filesystem error */
} qsieve_status;

typedef struct qsieve_config qsieve_config;

/* Loads and validates a config file. On success *out owns the handle. */
qsieve_status qsieve_config_load(const char* path, qsieve_config** out);

/* A fully defaulted config for the given experiment
 * (propagate | sieve | average-check | cp-check). */
qsieve_status qsieve_config_default(const char* experiment, qsieve_config** out);

void qsieve_config_free(qsieve_config* config);

/* Get/set a field by "section.key" name, e.g. "model.gamma". Values are the
 * same strings the config file grammar uses. */
qsieve_status qsieve_config_get(const qsieve_config* config, const char* key, char* buf,
                                size_t buf_len);
qsieve_status qsieve_config_set(qsieve_config* config, const char* key, const char* value);

/* Runs the configured experiment, writing artifacts into out_dir (pass NULL to
 * use the configured output directory). strict != 0 turns numeric degradation
 * flags into QSIEVE_ERR_NUMERIC. */
qsieve_status qsieve_run(const qsieve_config* config, const char* out_dir, int strict);

/* Regenerates the plot-data files from the result files in run_dir. */
qsieve_status qsieve_emit_plotdata(const char* run_dir);

/* Message for the most recent failure on this thread. */
const char* qsieve_last_error(void);

const char* qsieve_version(void);

/* Scalar helpers. */
qsieve_status qsieve_thermal_occupation(double beta_hbar_omega, double* out);
qsieve_status qsieve_g_correlated(double lambda, double sigma, double r, double* out);

#ifdef __cplusplus
}
#endif

#endif /* QSIEVE_H */
