//! Hand-written broken theories, each with the diagnostic it must produce
//! and the 1-based line and column of the offending token.

pub struct Malformed {
    pub name: &'static str,
    pub src: &'static str,
    pub code: &'static str,
    pub line: u32,
    pub col: u32,
}

pub const MALFORMED: &[Malformed] = &[
    Malformed {
        name: "stray character",
        src: "theory T\nbegin\nrule R: [ Fr(~k) ] --> [ Out(~k) ] %\nend\n",
        code: "LEX_ERROR",
        line: 3,
        col: 36,
    },
    Malformed {
        name: "missing colon after rule name",
        src: "theory T\nbegin\nrule R [ Fr(~k) ] --> [ Out(~k) ]\nend\n",
        code: "SYNTAX_ERROR",
        line: 3,
        col: 8,
    },
    Malformed {
        name: "mac with one argument",
        src: "theory T\nbegin\nfunctions: mac/2\nrule R:\n  [ Fr(~k) ] --> [ Out(mac(~k)) ]\nend\n",
        code: "ARITY_MISMATCH",
        line: 5,
        col: 24,
    },
    Malformed {
        name: "undeclared function",
        src: "theory T\nbegin\nrule R:\n  [ Fr(~k) ] --> [ Out(blind(~k)) ]\nend\n",
        code: "UNDECLARED_FUNCTION",
        line: 4,
        col: 24,
    },
    Malformed {
        name: "Fr in conclusion",
        src: "theory T\nbegin\nrule R:\n  [ ] --> [ Fr(~k) ]\nend\n",
        code: "FR_IN_CONCLUSION",
        line: 4,
        col: 13,
    },
    Malformed {
        name: "Out in premise",
        src: "theory T\nbegin\nrule R:\n  [ Out(x) ] --> [ ]\nend\n",
        code: "OUT_IN_PREMISE",
        line: 4,
        col: 5,
    },
    Malformed {
        name: "unbound conclusion variable",
        src: "theory T\nbegin\nrule R:\n  [ Fr(~k) ] --> [ Out(<~k, y>) ]\nend\n",
        code: "UNBOUND_VARIABLE",
        line: 4,
        col: 29,
    },
    Malformed {
        name: "duplicate rule",
        src: "theory T\nbegin\nrule R: [ Fr(~k) ] --> [ Out(~k) ]\nrule R: [ In(x) ] --> [ ]\nend\n",
        code: "DUPLICATE_RULE",
        line: 4,
        col: 6,
    },
    Malformed {
        name: "negated linear fact",
        src: "theory T\nbegin\nrule A: [ In(x) ] --> [ Seen(x) ]\nrule R:\n  [ In(x), not(Seen(x)) ] --> [ ]\nend\n",
        code: "NEGATED_NON_PERSISTENT",
        line: 5,
        col: 16,
    },
    Malformed {
        name: "K in a rule",
        src: "theory T\nbegin\nrule R:\n  [ K(x) ] --> [ Out(x) ]\nend\n",
        code: "K_IN_RULE",
        line: 4,
        col: 5,
    },
    Malformed {
        name: "fact used with two arities",
        src: "theory T\nbegin\nrule A: [ Fr(~k) ] --> [ St(~k) ]\nrule B: [ St(k, k) ] --> [ ]\nend\n",
        code: "FACT_KIND_MISMATCH",
        line: 4,
        col: 11,
    },
    Malformed {
        name: "unguarded lemma",
        src: "theory T\nbegin\nrule R: [ In(x) ] --[ Got(x) ]-> [ ]\nlemma L:\n  \"All x #i. Got(x) @ #i ==> (Ex y. y = x)\"\nend\n",
        code: "UNGUARDED_FORMULA",
        line: 5,
        col: 34,
    },
];
