//! Tampered scripts must be rejected: the checker is only useful if small
//! corruptions of a valid proof fail loudly.

use std::path::{Path, PathBuf};

use avon::proofcheck::{check_proof, load_script};

fn corpora(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpora")
        .join(name)
}

fn with_mutation(source: &str, from: &str, to: &str) -> PathBuf {
    assert!(source.contains(from), "mutation anchor `{from}` not found");
    let mutated = source.replacen(from, to, 1);
    // a private directory per mutation: tests run in parallel and must not
    // overwrite each other's model copies
    let dir = std::env::temp_dir()
        .join("avon_mutations")
        .join(format!("{:x}", fingerprint(&mutated)));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("mutated.lp");
    std::fs::write(&path, mutated).unwrap();
    // the model is resolved relative to the script
    for model in ["bocardo.lm", "nat6.lm"] {
        std::fs::copy(corpora(model), dir.join(model)).unwrap();
    }
    path
}

fn fingerprint(s: &str) -> u64 {
    s.bytes().fold(0xcbf29ce484222325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x100000001b3)
    })
}

fn expect_reject(path: &Path, at_step: usize) {
    let script = load_script(path).expect("mutated script should still load");
    let verdict = check_proof(&script);
    assert!(!verdict.accepted, "mutation was accepted");
    let (id, _) = verdict.first_failure.expect("a failure must be recorded");
    assert_eq!(id, at_step, "failure reported at the wrong step");
}

#[test]
fn swapped_premise_order_is_rejected() {
    let source = std::fs::read_to_string(corpora("bocardo.lp")).unwrap();
    let path = with_mutation(&source, "by R5.3 from 1,2", "by R5.3 from 2,1");
    expect_reject(&path, 3);
}

#[test]
fn corrupted_conclusion_is_rejected() {
    let source = std::fs::read_to_string(corpora("bocardo.lp")).unwrap();
    // flip the final conclusion's consequent set from C to B
    let path = with_mutation(
        &source,
        "step 17: (→)((∧)((∃)({}(x:A,(¬)((∈)(x,B)))),(∀)({}(y:C,(∈)(y,B)))),(∃)({}(z:A,(¬)((∈)(z,C)))))",
        "step 17: (→)((∧)((∃)({}(x:A,(¬)((∈)(x,B)))),(∀)({}(y:C,(∈)(y,B)))),(∃)({}(z:A,(¬)((∈)(z,B)))))",
    );
    expect_reject(&path, 17);
}

#[test]
fn wrong_metavariable_binding_is_rejected() {
    let source = std::fs::read_to_string(corpora("bocardo.lp")).unwrap();
    // step 5 claims membership in A; pointing the index at a non-existent
    // binder must fail the shape check
    let path = with_mutation(&source, "by A5.16 binders(x:A) i(1)", "by A5.16 binders(x:A) i(2)");
    expect_reject(&path, 5);
}

#[test]
fn semantic_step_must_evaluate_true() {
    let source = std::fs::read_to_string(corpora("divides.lp")).unwrap();
    // corrupt the first semantic axiom: claim divisibility is equivalent to
    // a product the other way round
    let path = with_mutation(
        &source,
        "step 1: (∀)({}(x:N,(∀)({}(y:N,(∀)({}(z:N,(↔)((|)(x,y),(∃)({}(c:N,(=)(y,(*)(x,c)))))))))))",
        "step 1: (∀)({}(x:N,(∀)({}(y:N,(∀)({}(z:N,(↔)((|)(x,y),(∃)({}(c:N,(=)(x,(*)(y,c)))))))))))",
    );
    expect_reject(&path, 1);
}

#[test]
fn dropped_binder_breaks_the_shape() {
    let source = std::fs::read_to_string(corpora("bocardo.lp")).unwrap();
    let path = with_mutation(
        &source,
        "by R5.15 from 4,6 binders(x:A,z:A)",
        "by R5.15 from 4,6 binders(x:A,y:C)",
    );
    expect_reject(&path, 7);
}
