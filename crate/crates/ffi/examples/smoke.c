/* Minimal C consumer of the corrkit ABI. */
#include <assert.h>
#include <stdio.h>
#include "../include/corrkit.h"

int main(void) {
    double data[4] = {1.0, -2.0, -2.0, 1.0};
    CorrkitMatrix *m = NULL;
    assert(corrkit_matrix_new(2, data, &m) == CORRKIT_STATUS_OK);
    assert(corrkit_matrix_order(m) == 2);

    CorrkitDefiniteness *v = NULL;
    assert(corrkit_cpd_exact(m, &v) == CORRKIT_STATUS_OK);
    assert(corrkit_definiteness_verdict(v) == CORRKIT_VERDICT_NOT_POSITIVE);

    int32_t witness[2];
    assert(corrkit_definiteness_witness(v, witness, 2) == CORRKIT_STATUS_OK);
    printf("witness = (%d, %d)\n", witness[0], witness[1]);
    assert(witness[0] == 1 && witness[1] == 1);

    double rho[3] = {1.0, -0.6, 0.0};
    CorrkitMembership *h = NULL;
    assert(corrkit_acf_unit_test(rho, 3, 7, &h) == CORRKIT_STATUS_OK);
    assert(corrkit_membership_is_member(h) == 0);

    char *json = NULL;
    assert(corrkit_membership_to_json(h, &json) == CORRKIT_STATUS_OK);
    printf("verdict json bytes: %zu\n", (size_t)0 + __builtin_strlen(json));
    corrkit_string_free(json);

    corrkit_membership_free(h);
    corrkit_definiteness_free(v);
    corrkit_matrix_free(m);
    printf("smoke ok\n");
    return 0;
}
