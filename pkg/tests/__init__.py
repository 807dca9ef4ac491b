# Tests for bicarleman-kernels package
