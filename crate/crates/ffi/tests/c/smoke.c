#include <math.h>
#include <stdio.h>
#include <string.h>

#include "flagged_epp.h"

#define CHECK(call)                                                                 \
    do {                                                                            \
        FepStatus st_ = (call);                                                     \
        if (st_ != FEP_STATUS_OK) {                                                 \
            fprintf(stderr, "%s failed: %s (%s)\n", #call, fep_status_name(st_),    \
                    fep_last_error_message());                                      \
            return 1;                                                               \
        }                                                                           \
    } while (0)

int main(void) {
    FepNoiseModel *a = NULL, *b = NULL, *noise = NULL;
    FepFlaggedState *s0 = NULL, *s1 = NULL;
    double f, fc, eps, p, cells[FEP_CELLS];

    CHECK(fep_noise_one_qubit_white(0.97, &a));
    CHECK(fep_noise_two_qubit_white(0.97, &b));
    CHECK(fep_noise_compose(a, b, &noise));
    CHECK(fep_state_werner(0.7, &s0));
    CHECK(fep_state_step(s0, noise, &s1, &p));
    CHECK(fep_state_fidelities(s1, &f, &fc, &eps));
    CHECK(fep_state_cells(s1, cells));

    double sum = 0.0;
    for (int i = 0; i < FEP_CELLS; i++) sum += cells[i];
    if (fabs(sum - 1.0) > 1e-12 || p <= 0.0 || p > 1.0 || f <= 0.7) {
        fprintf(stderr, "bad step: sum %g p %g F %g\n", sum, p, f);
        return 1;
    }

    FepFlaggedState *bad = NULL;
    double half[2] = {0.5, 0.4};
    FepStatus st = fep_state_from_cells(half, 2, &bad);
    if (st != FEP_STATUS_DOMAIN || bad != NULL || fep_last_error_message() == NULL) {
        fprintf(stderr, "expected a domain error, got %s\n", fep_status_name(st));
        return 1;
    }

    printf("%s %.12f %.12f %.12f\n", fep_version(), f, fc, p);
    fep_state_free(s1);
    fep_state_free(s0);
    fep_noise_free(noise);
    fep_noise_free(b);
    fep_noise_free(a);
    fep_noise_free(NULL);
    return 0;
}
