/* cc examples/smoke.c -Iinclude -L../../target/debug -lentbell_ffi -o smoke */
#include <stdio.h>

#include "entbell.h"

static const double PI = 3.14159265358979323846;

int main(void) {
    EbPrepared *p = NULL;
    if (eb_prepared_new_calibrated(&p) != EB_STATUS_OK) {
        fprintf(stderr, "prepare: %s\n", eb_last_error_message());
        return 1;
    }

    const double settings[4][2] = {
        {0.0, PI / 8}, {PI / 4, PI / 8}, {0.0, 3 * PI / 8}, {PI / 4, 3 * PI / 8}};
    EbNoise noise = {EB_NOISE_KIND_UNIFORM, 0.8768, 0.0};
    EbEstimate e[4];
    for (int k = 0; k < 4; k++) {
        EbCounts c;
        if (eb_simulate_counts(p, settings[k][0], settings[k][1], &noise, 385.0, (uint64_t)k, &c) != EB_STATUS_OK ||
            eb_correlation_from_counts(&c, &e[k]) != EB_STATUS_OK) {
            fprintf(stderr, "setting %d: %s\n", k, eb_last_error_message());
            eb_prepared_free(p);
            return 1;
        }
    }
    EbChshResult r;
    eb_chsh(e, &r);
    printf("entbell %s: S = %.3f +- %.3f (%.1f sigma), local bound %.1f\n", eb_version(), r.s_value, r.s_sigma,
           r.sigmas_of_violation, eb_lhv_max_chsh());

    eb_prepared_free(p);
    return r.violates_local_bound ? 0 : 1;
}
