/* Compiled as C: verifies the public header needs nothing from C++. */
#include <stdio.h>
#include <string.h>

#include "boostmetric.h"

int main(void) {
  if (bm_version() == NULL) return 1;
  if (bm_last_error() == NULL) return 1;

  bm_train_options topts;
  bm_train_options_init(&topts);
  if (topts.max_iterations != 500 || topts.triplet_k != 3) return 1;

  bm_eval_options eopts;
  bm_eval_options_init(&eopts);
  if (eopts.runs != 10 || eopts.knn_k != 3) return 1;

  /* error paths must set a message and return the documented codes */
  bm_dataset* ds = NULL;
  if (bm_dataset_load_csv("/nonexistent/file.csv", "0", ',', &ds) != BM_ERR_DATA)
    return 1;
  if (strlen(bm_last_error()) == 0) return 1;
  if (bm_dataset_load_csv(NULL, "0", ',', &ds) != BM_ERR_USAGE) return 1;

  printf("capi header check ok (version %s)\n", bm_version());
  return 0;
}
