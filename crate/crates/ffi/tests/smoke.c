#include <math.h>
#include <stdio.h>
#include <stdlib.h>

#include "sensorimotor.h"

#define CHECK(call)                                                        \
    do {                                                                   \
        SmStatus s_ = (call);                                              \
        if (s_ != SM_STATUS_OK) {                                          \
            char msg_[256];                                                \
            sm_last_error_message(msg_, sizeof msg_);                      \
            fprintf(stderr, "%s: %s: %s\n", #call, sm_status_name(s_), msg_); \
            return 1;                                                      \
        }                                                                  \
    } while (0)

int main(void) {
    SmExperiment *exp = NULL;
    CHECK(sm_experiment_new_sim1(0, false, &exp));
    CHECK(sm_experiment_set_changes(exp, 50));
    CHECK(sm_experiment_run(exp));

    size_t n = 0;
    CHECK(sm_experiment_state_count(exp, &n));
    double *c = malloc(n * n * sizeof *c);
    CHECK(sm_experiment_copy_probabilities(exp, c, n * n));
    for (size_t i = 0; i < n; i++) {
        if (c[i * n + i] != 1.0) {
            fprintf(stderr, "diagonal %zu is %f\n", i, c[i * n + i]);
            return 1;
        }
    }
    double purity = 0;
    CHECK(sm_experiment_purity(exp, &purity));
    if (sm_experiment_copy_probabilities(exp, c, 1) != SM_STATUS_BUFFER_TOO_SMALL) {
        return 1;
    }
    printf("states %zu purity %.3f\n", n, purity);
    free(c);
    sm_experiment_free(exp);
    return 0;
}
