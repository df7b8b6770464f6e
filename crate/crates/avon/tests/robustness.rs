//! The checker must not depend on one particular finite model: the same
//! proof text verifies over any modulus, and empty domains stay well formed.

use std::path::{Path, PathBuf};

use avon::proofcheck::{check_proof, load_script};

fn corpora(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpora")
        .join(name)
}

fn modular_model(n: u64) -> String {
    let atoms: Vec<String> = (0..n).map(|a| format!("#{a}")).collect();
    let mut mul = Vec::new();
    let mut div = Vec::new();
    for a in 0..n {
        for b in 0..n {
            mul.push(format!("(#{a},#{b})->#{}", a * b % n));
            let divides = (0..n).any(|e| a * e % n == b);
            div.push(format!("(#{a},#{b})->{divides}"));
        }
    }
    format!(
        "const N = {{{}}}\nconst * = fun(2){{{}}}\nconst | = fun(2){{{}}}\n",
        atoms.join(","),
        mul.join(";"),
        div.join(";")
    )
}

#[test]
fn divides_proof_is_model_independent() {
    // transitivity of the witnessed-product relation holds for any modulus,
    // and the script never names the universe size
    let script_text = std::fs::read_to_string(corpora("divides.lp")).unwrap();
    for n in [2u64, 4] {
        let dir = std::env::temp_dir().join(format!("avon_mod{n}"));
        std::fs::create_dir_all(&dir).unwrap();
        std::fs::write(dir.join("nat6.lm"), modular_model(n)).unwrap();
        let path = dir.join("divides.lp");
        std::fs::write(&path, &script_text).unwrap();
        let script = load_script(&path).unwrap();
        let verdict = check_proof(&script);
        assert!(
            verdict.accepted,
            "mod-{n} model rejected: {:?}",
            verdict.first_failure
        );
    }
}

#[test]
fn empty_domains_quantify_vacuously() {
    let dir = std::env::temp_dir().join("avon_empty_domain");
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::write(dir.join("empty.lm"), "const E = {}\nconst A = {#1}\n").unwrap();
    let script = "\
model \"empty.lm\"
vars x
step 1: (∀)({}(x:E,(→)((∧)((∈)(x,A),(∈)(x,E)),(∈)(x,A))))
  by A5.2 binders(x:E) phi((∈)(x,A)) psi((∈)(x,E))
step 2: (∀)({}(x:E,(→)((∈)(x,E),(∈)(x,A))))
  by semantic
qed 2
";
    let path = dir.join("empty.lp");
    std::fs::write(&path, script).unwrap();
    let script = load_script(&path).unwrap();
    let verdict = check_proof(&script);
    assert!(verdict.accepted, "{:?}", verdict.first_failure);
}
