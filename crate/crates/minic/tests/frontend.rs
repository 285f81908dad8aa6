mod common;

use common::{checked, fixture, FIXTURES};
use minic::{load, parse_minic, pretty_print, typecheck, CheckError, FrontendError, StmtKind};

#[test]
fn algorithm_two_parses_into_two_functions() {
    let p = parse_minic(&fixture("distribute_candies_buggy.c")).unwrap();
    let names: Vec<&str> = p.functions.iter().map(|f| f.name.as_str()).collect();
    assert_eq!(names, ["distributeCandies", "main"]);
    let main = p.entry().unwrap();
    let StmtKind::Assert(e) = &main.body.stmts[0].kind else {
        panic!("first statement of main is not an assertion");
    };
    assert_eq!(minic::pretty::expr(e), "(distributeCandies(5, 2) == 3)");
}

#[test]
fn algorithm_two_has_twelve_statements() {
    let c = checked("distribute_candies_buggy.c");
    let texts: Vec<&str> = c.statements().iter().map(|s| s.text.as_str()).collect();
    assert_eq!(
        texts,
        [
            "limit = (limit < n) ? limit : n;",
            "int ans = 0;",
            "ans = 0 + 1;",
            "int i = 0",
            "i <= limit",
            "i++",
            "if (n - i > limit * 2)",
            "continue;",
            "ans += ((limit < n-i) ? limit : (n-i)) - ((n-i-limit > 0) ?(n-i-limit) : 0) + 1;",
            "return ans;",
            "assert(distributeCandies(5, 2) == 3);",
            "return 0;",
        ]
    );
    for (i, s) in c.statements().iter().enumerate() {
        assert_eq!(s.id.0 as usize, i);
    }
}

#[test]
fn statement_ids_are_unique_with_distinct_spans() {
    for name in FIXTURES {
        let c = checked(name);
        let mut spans: Vec<_> = c.statements().iter().map(|s| s.span).collect();
        let n = spans.len();
        spans.sort();
        spans.dedup();
        assert_eq!(spans.len(), n, "{name}");
    }
}

#[test]
fn minimal_program() {
    let c = load("int main(){return 0;}").unwrap();
    assert_eq!(c.program().functions.len(), 1);
}

#[test]
fn rejects_out_of_subset_constructs() {
    for src in [
        "int main(){ int *p = malloc(4); }",
        "struct s { int x; }; int main(){return 0;}",
        "int main(){ goto end; }",
        "int main(){ int x = (char) 3; return x; }",
        "int g; int main(){return 0;}",
        "int main(){ int a[3]; return 0; }",
        "int main(){ float f = 1; return 0; }",
        "#define N 3\nint main(){return N;}",
    ] {
        assert!(parse_minic(src).is_err(), "{src}");
    }
}

#[test]
fn undefined_function_and_variable() {
    let e = load("int main(){ return g(); }").unwrap_err();
    assert!(
        matches!(e, FrontendError::Check(CheckError::UndefinedSymbol { ref name, .. }) if name == "g")
    );
    let e = load("int main(){ return y; }").unwrap_err();
    assert!(matches!(
        e,
        FrontendError::Check(CheckError::UndefinedSymbol { .. })
    ));
}

#[test]
fn string_in_int_context() {
    let p = parse_minic("int main(){ if (\"abc\") {} return 0; }").unwrap();
    assert!(matches!(typecheck(p), Err(CheckError::TypeError { .. })));
}

#[test]
fn type_errors() {
    for src in [
        "int f(int a){ return a; } int main(){ return f(1, 2); }",
        "void f(){ } int main(){ int x = f(); return x; }",
        "int f(int a){ if (a) return 1; } int main(){ return f(1); }",
        "int main(){ const char *s = \"ab\"; s = \"c\"; return 0; }",
        "int main(){ int x = 1; int x = 2; return x; }",
        "int main(){ break; }",
        "int main(int argc){ return 0; }",
        "int f(){ return 0; } int f(){ return 1; } int main(){ return 0; }",
    ] {
        assert!(load(src).is_err(), "{src}");
    }
}

#[test]
fn accepted_idioms() {
    for src in [
        "int main(void){ int i; for (i = 0; i < 3; i++) {} return 0; }",
        "int f(int x){ while (1) { if (x) return 1; x++; } } int main(){ return f(0); }",
        "int max(int a, int b){ return a > b ? a : b; } int main(){ return max(1, 2); }",
        "int main(){ int a = 0, b = 1; a += b; --a; return (int) a; }",
        "int main(){ int x = __VERIFIER_nondet_int(); __CPROVER_assume(x > 0); assert(x != 0); }",
        "static inline int g(const char s[]){ return s[0]; } int main(){ return g(\"x\"); }",
    ] {
        if let Err(e) = load(src) {
            panic!("{src}: {}", e.render("t.c"));
        }
    }
}

#[test]
fn diagnostics_are_file_line_col() {
    let e = load("int main(){\n  return y;\n}").unwrap_err();
    assert_eq!(e.render("prog.c"), "prog.c:2:10: undefined symbol 'y'");
}

#[test]
fn fixtures_round_trip_through_pretty_printer() {
    for name in FIXTURES {
        let p = parse_minic(&fixture(name)).unwrap();
        let printed = pretty_print(&p);
        let q = parse_minic(&printed).unwrap_or_else(|e| panic!("{name}: {e}\n{printed}"));
        assert_eq!(p.erase_locations(), q.erase_locations(), "{name}");
        // Statement numbering is stable under printing.
        let a = typecheck(p).unwrap();
        let b = typecheck(q).unwrap();
        assert_eq!(a.statements().len(), b.statements().len());
    }
}
