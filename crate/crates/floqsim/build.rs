fn main() {
    // Hermitian eigendecompositions go through LAPACK's zheevd; the system
    // OpenBLAS carries the full LAPACK symbol set.
    println!("cargo:rustc-link-lib=dylib=openblas");
    println!("cargo:rustc-link-search=native=/usr/lib/x86_64-linux-gnu");
}
