#ifndef SLOWLAB_H
#define SLOWLAB_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes returned by slowlab_run_execute (they double as CLI exit
 * codes): 0 success, 2 config/schema error, 3 insufficient fiber data,
 * 4 unsupported operation. */
#define SLOWLAB_OK 0
#define SLOWLAB_ERR_SCHEMA 2
#define SLOWLAB_ERR_FIBER_DATA 3
#define SLOWLAB_ERR_UNSUPPORTED 4

typedef struct slowlab_run slowlab_run;

/* Takes ownership of nothing; the config text is copied. Returns NULL
 * only on allocation failure. */
slowlab_run* slowlab_run_create(const char* config_json);
void slowlab_run_destroy(slowlab_run* run);

void slowlab_run_set_seed(slowlab_run* run, uint64_t seed);
void slowlab_run_set_out_dir(slowlab_run* run, const char* out_dir);
void slowlab_run_set_threads(slowlab_run* run, int threads);

/* command: cov | relcov | profile | ks | rigidity | mixing | validate.
 * Writes CSV and metadata files into the output directory. */
int slowlab_run_execute(slowlab_run* run, const char* command);

/* Message for the last failed execute on this run; empty on success.
 * Valid until the next execute or destroy. */
const char* slowlab_run_error(const slowlab_run* run);

const char* slowlab_version(void);

/* exp(n * (eps*log(r-1) + H(eps,1-eps))), the Hamming ball bound. */
double slowlab_ball_count_bound(uint64_t n, uint32_t alphabet, double eps);

#ifdef __cplusplus
}
#endif

#endif /* SLOWLAB_H */
