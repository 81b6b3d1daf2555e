// SPDX-License-Identifier: Apache-2.0
//
// hmsrelay - reconfigurable Huygens metasurface relay simulator
// Copyright (C) 2026 The hmsrelay authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef hms_cli_H
#define hms_cli_H

namespace hms
{
    // Command-line entry point. Returns 0 on success, 1 on a domain error, 2 on a usage or config error.
    int run(int argc, char **argv);
}

#endif
