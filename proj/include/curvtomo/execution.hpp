#pragma once

namespace curvtomo {

// Serial paths are the reference implementations; Parallel paths use OpenMP
// and must reproduce the serial results bit for bit.
enum class Execution { Serial, Parallel };

}  // namespace curvtomo
