// Copyright 2026 The FESS Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* Compiled as C to keep the public header C-clean. */
#include "fess/fess.h"

int capi_c_smoke(void) {
  fess_config* cfg = NULL;
  uint64_t seed = 1;
  if (fess_config_default(&cfg) != FESS_OK) return 1;
  if (fess_config_set_seed(cfg, 17) != FESS_OK) return 2;
  if (fess_config_seed(cfg, &seed) != FESS_OK || seed != 17) return 3;
  fess_config_free(cfg);
  fess_config_free(NULL);
  return fess_version()[0] == '\0' ? 4 : 0;
}
