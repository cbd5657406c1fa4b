//! Generates the C header with cbindgen when possible; otherwise installs
//! the handwritten `include/copgame.h` checked into the repository. Either
//! way the header lands in `$OUT_DIR/include/copgame.h`.

use std::path::PathBuf;

fn main() {
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=include/copgame.h");
    println!("cargo:rerun-if-changed=cbindgen.toml");

    let crate_dir = PathBuf::from(std::env::var("CARGO_MANIFEST_DIR").unwrap());
    let out_dir = PathBuf::from(std::env::var("OUT_DIR").unwrap()).join("include");
    std::fs::create_dir_all(&out_dir).unwrap();
    let target = out_dir.join("copgame.h");

    let generated = cbindgen::Builder::new()
        .with_crate(&crate_dir)
        .with_config(
            cbindgen::Config::from_file(crate_dir.join("cbindgen.toml"))
                .unwrap_or_default(),
        )
        .generate();
    match generated {
        Ok(bindings) => {
            bindings.write_to_file(&target);
        }
        Err(e) => {
            println!(
                "cargo:warning=cbindgen failed ({e}); installing the handwritten header"
            );
            std::fs::copy(crate_dir.join("include/copgame.h"), &target).unwrap();
        }
    }
}
