use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

fn cdomain(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cdomain")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = cdomain(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    stdout(&out)
}

fn code(args: &[&str]) -> i32 {
    cdomain(args).status.code().expect("exit code")
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = path(dir, name);
    fs::write(&p, text).unwrap();
    p
}

fn read_orders(p: impl AsRef<Path>) -> Vec<Vec<u8>> {
    fs::read_to_string(p)
        .unwrap()
        .lines()
        .map(|l| l.split(' ').map(|x| x.parse().unwrap()).collect())
        .collect()
}

fn permutations(n: u8) -> Vec<Vec<u8>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for at in 0..=p.len() {
            let mut q = p.clone();
            q.insert(at, n);
            out.push(q);
        }
    }
    out.sort();
    out
}

#[test]
fn build_alternating_scheme() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "a8.dom");
    assert_eq!(ok(&["build", "-n", "8", "--scheme", "alternating", "-o", &out]), "size=222\n");
    let orders = read_orders(&out);
    assert_eq!(orders.len(), 222);
    assert!(orders.windows(2).all(|w| w[0] < w[1]));
    assert!(orders.iter().all(|o| o.len() == 8));
}

#[test]
fn build_without_constraints_gives_every_order() {
    let dir = TempDir::new().unwrap();
    let trs = write(&dir, "empty.trs", "");
    let out = path(&dir, "d.dom");
    assert_eq!(ok(&["build", "-n", "3", "--trs", &trs, "-o", &out]), "size=6\n");
    assert_eq!(fs::read_to_string(&out).unwrap(), "1 2 3\n1 3 2\n2 1 3\n2 3 1\n3 1 2\n3 2 1\n");
}

#[test]
fn build_from_tls() {
    let dir = TempDir::new().unwrap();
    let tls = write(&dir, "avoid231.tls", "1 2 3 : 2-3-1\n1 2 4 : 2-3-1\n1 3 4 : 2-3-1\n2 3 4 : 2-3-1\n");
    let out = path(&dir, "d.dom");
    assert_eq!(ok(&["build", "-n", "4", "--tls", &tls, "-o", &out]), "size=14\n");
    assert_eq!(read_orders(&out).len(), 14);
}

#[test]
fn build_from_trs_file_matches_scheme() {
    let dir = TempDir::new().unwrap();
    let mut text = String::new();
    for a in 1..=6u8 {
        for b in a + 1..=6 {
            for c in b + 1..=6 {
                text.push_str(&format!("{a} {b} {c} {}\n", if b % 2 == 1 { "2N3" } else { "2N1" }));
            }
        }
    }
    let trs = write(&dir, "alt6.trs", &text);
    assert_eq!(ok(&["size", "-n", "6", "--trs", &trs]), "45\n");
    assert_eq!(ok(&["size", "-n", "6", "--scheme", "alternating"]), "45\n");
}

#[test]
fn size_alternating_and_jobs() {
    assert_eq!(ok(&["size", "-n", "10", "--scheme", "alternating"]), "1069\n");
    let one = ok(&["size", "-n", "8", "--avoid", "2-5-3-1-4", "--jobs", "1"]);
    let four = ok(&["size", "-n", "8", "--avoid", "2-5-3-1-4", "--jobs", "4"]);
    assert_eq!(one, four);
}

#[test]
fn size_avoiding_k5_pattern_matches_brute_force() {
    let pattern = [2u8, 5, 3, 1, 4];
    let contains = |w: &[u8]| {
        let n = w.len();
        let mut idx = [0usize; 5];
        fn rec(w: &[u8], p: &[u8; 5], idx: &mut [usize; 5], j: usize, start: usize) -> bool {
            if j == 5 {
                return true;
            }
            (start..w.len()).any(|i| {
                idx[j] = i;
                (0..j).all(|s| (w[idx[s]] < w[i]) == (p[s] < p[j])) && rec(w, p, idx, j + 1, i + 1)
            })
        }
        n >= 5 && rec(w, &pattern, &mut idx, 0, 0)
    };
    for n in 5..=8u8 {
        let expected = permutations(n).iter().filter(|w| !contains(w)).count();
        assert_eq!(ok(&["size", "-n", &n.to_string(), "--avoid", "2-5-3-1-4"]), format!("{expected}\n"), "n={n}");
    }
}

/// Smallest sorted relabelling over all `n!` bijections.
fn brute_force_hash(orders: &[Vec<u8>], n: u8) -> Vec<Vec<u8>> {
    permutations(n)
        .iter()
        .map(|g| {
            let mut d: Vec<Vec<u8>> = orders.iter().map(|o| o.iter().map(|&x| g[x as usize - 1]).collect()).collect();
            d.sort();
            d
        })
        .min()
        .unwrap()
}

fn as_text(orders: &[Vec<u8>]) -> String {
    orders.iter().map(|o| o.iter().map(u8::to_string).collect::<Vec<_>>().join(" ") + "\n").collect()
}

#[test]
fn hash_singleton() {
    let dir = TempDir::new().unwrap();
    let d = write(&dir, "s.dom", "2 1 3\n");
    assert_eq!(ok(&["hash", &d]), "1 2 3\n");
}

#[test]
fn hash_matches_brute_force_and_is_relabel_invariant() {
    let dir = TempDir::new().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let all = permutations(5);
    for round in 0..5 {
        let mut orders: Vec<Vec<u8>> = all.choose_multiple(&mut rng, 7 + round).cloned().collect();
        orders.sort();
        let d = write(&dir, "d.dom", &as_text(&orders));
        let hashed = ok(&["hash", &d]);
        assert_eq!(hashed, as_text(&brute_force_hash(&orders, 5)));

        let g = all.choose(&mut rng).unwrap();
        let mut relabeled: Vec<Vec<u8>> =
            orders.iter().map(|o| o.iter().map(|&x| g[x as usize - 1]).collect()).collect();
        relabeled.sort();
        let r = write(&dir, "r.dom", &as_text(&relabeled));
        let out = path(&dir, "h.dom");
        ok(&["hash", &r, "-o", &out]);
        assert_eq!(fs::read_to_string(&out).unwrap(), hashed);
        assert_eq!(ok(&["hash", &out]), hashed);
    }
}

fn best(results: &str) -> u64 {
    results.lines().next().and_then(|l| l.split(' ').nth(1)).map_or(0, |s| s.parse().unwrap())
}

#[test]
fn search_reaches_alternating_size_at_six() {
    let out = ok(&["search", "-n", "6", "--max-results", "5"]);
    assert!(best(&out) >= 45, "{out}");
    let lines: Vec<&str> = out.lines().collect();
    assert!(lines.len() <= 5);
    assert!(lines.iter().all(|l| l.split(' ').next().unwrap().len() == 20));
}

#[test]
fn search_resume_reproduces_results() {
    let dir = TempDir::new().unwrap();
    let cp = path(&dir, "cp.txt");
    let common = ["search", "-n", "5", "--batch", "3", "--frontier-cap", "50"];
    let full = ok(&common);
    let mut paused = common.to_vec();
    paused.extend(["--max-rounds", "4", "--checkpoint", &cp]);
    ok(&paused);
    assert!(fs::read_to_string(&cp).unwrap().starts_with("n=5 k=3 ordering=colex rules=3467\n"));
    let mut resumed = common.to_vec();
    resumed.extend(["--resume", &cp]);
    assert_eq!(ok(&resumed), full);

    let mut other = vec!["search", "-n", "6", "--resume", &cp];
    other.extend(["--frontier-cap", "50"]);
    assert_eq!(code(&other), 2);
}

#[test]
fn prune_iso_keeps_best_size() {
    for n in ["4", "5"] {
        let args = ["search", "-n", n, "--rules", "1N1,3N1,2N2", "--frontier-cap", "1000000", "--max-results", "1"];
        let plain = ok(&args);
        let mut pruned = args.to_vec();
        pruned.push("--prune-iso");
        assert_eq!(best(&ok(&pruned)), best(&plain), "n={n}");
    }
}

#[test]
fn dfs_and_prs_agree_when_exhaustive() {
    let args = ["search", "-n", "4", "--rules", "1N1,1N2,1N3,2N1,2N2,2N3,3N1,3N2,3N3", "--frontier-cap", "1000000"];
    let prs = ok(&args);
    let mut dfs = args.to_vec();
    dfs.push("--dfs");
    assert_eq!(ok(&dfs), prs);
    // empty domains are dropped
    let count = prs.lines().count();
    assert!(count > 0 && count <= 9usize.pow(4));
    assert!(prs.lines().all(|l| !l.ends_with(" 0")));
}

#[test]
fn subsets_of_alternating_trs() {
    let dir = TempDir::new().unwrap();
    let trs = write(&dir, "a4.trs", "1 2 3 2N1\n1 2 4 2N1\n1 3 4 2N3\n2 3 4 2N3\n");
    assert_eq!(ok(&["subsets", "-n", "4", "--trs", &trs, "-t", "3"]), "4\n4\n6\n6\n");
}

#[test]
fn verify_suites() {
    let out = ok(&["verify", "catalan", "--max-n", "6"]);
    for (n, c) in [(1, 1), (2, 2), (3, 5), (4, 14), (5, 42), (6, 132)] {
        assert!(out.contains(&format!("PASS avoid 2-3-1 n={n}: {c}\n")), "{out}");
    }
    assert!(!out.contains("FAIL"));
    let out = ok(&["verify", "length4", "--max-n", "8"]);
    assert!(out.contains("PASS A022558 avoid 1-3-4-2 n=8: 15485"));
    assert!(out.contains("PASS A061552 avoid 1-3-2-4 n=8: 15793"));
    assert!(out.contains("PASS A005802 avoid 1-2-3-4 n=8: 15767"));
    let out = ok(&["verify", "alternating"]);
    assert!(out.contains("PASS alternating scheme n=11: 2324"));
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.trs", "1 2 3 2N1\n1 2\n");
    assert_eq!(code(&["size", "-n", "3", "--trs", &bad]), 1);
    let dup = write(&dir, "dup.dom", "1 2 3\n1 2 3\n");
    assert_eq!(code(&["hash", &dup]), 1);
    assert_eq!(code(&["hash", &path(&dir, "missing.dom")]), 1);
    assert_eq!(code(&["size", "-n", "4", "--scheme", "nope"]), 2);
    assert_eq!(code(&["size", "-n", "4"]), 2);
    assert_eq!(code(&["size", "-n", "4", "--avoid", "1-2-2"]), 2);
    assert_eq!(code(&["search", "-n", "5", "--rules", "4N1"]), 2);
    assert_eq!(code(&["frobnicate"]), 2);

    let fixtures = TempDir::new().unwrap();
    fs::write(fixtures.path().join("X.txt"), "pattern 1-2-3-4\n1,1,2,6,23,104\n").unwrap();
    let dir_arg = fixtures.path().to_str().unwrap();
    let out = cdomain(&["verify", "length4", "--max-n", "5", "--fixtures", dir_arg]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stdout(&out).contains("FAIL X avoid 1-2-3-4 n=5: expected 104, got 103"));
}
