fn main() {
    // system reference LAPACK provides zgesvd
    println!("cargo:rustc-link-lib=lapack");
}
