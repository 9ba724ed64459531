#include <stdio.h>
#include <string.h>
#include "trustprop.h"

int main(void) {
    uint32_t src[] = {0, 1, 2};
    uint32_t dst[] = {1, 2, 3};
    TpGraph *g = NULL;
    if (tp_graph_from_edges(4, src, dst, 3, &g) != TP_STATUS_OK) return 1;
    double node[] = {0.9, 0.5, 0.5, 0.1};
    double edge[] = {0.9, 0.9, 0.9};
    double out[4];
    if (tp_propagate_lbp(g, node, edge, 0, NULL, 0, NULL, 0, out) != TP_STATUS_OK) return 2;
    int labels[] = {TP_LABEL_BENIGN, TP_LABEL_BENIGN, TP_LABEL_SYBIL, TP_LABEL_SYBIL};
    double auc = 0.0;
    if (tp_auc(out, labels, 4, &auc) != TP_STATUS_OK) return 3;
    edge[0] = 2.0;
    if (tp_propagate_lbp(g, node, edge, 0, NULL, 0, NULL, 0, out) != TP_STATUS_OUT_OF_RANGE) return 4;
    if (strlen(tp_last_error()) == 0) return 5;
    printf("%s %.3f\n", tp_version(), auc);
    tp_graph_free(g);
    return 0;
}
