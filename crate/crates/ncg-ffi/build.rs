use std::env;
use std::path::PathBuf;

fn main() {
    let crate_dir = env::var("CARGO_MANIFEST_DIR").unwrap();
    let out = PathBuf::from(env::var("OUT_DIR").unwrap()).join("ncg.h");
    match cbindgen::generate(&crate_dir) {
        Ok(bindings) => {
            bindings.write_to_file(&out);
            // keep the checked-in header current when the tree is writable
            let tracked = PathBuf::from(&crate_dir).join("include").join("ncg.h");
            let _ = std::fs::create_dir_all(tracked.parent().unwrap());
            let _ = std::fs::copy(&out, &tracked);
        }
        Err(err) => println!("cargo:warning=header generation failed: {err}"),
    }
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");
}
