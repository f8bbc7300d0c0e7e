use super::script::ProofScript;
use crate::error::{Error, Result};
use crate::syntax::{parse, Formula};

/// A shipped proof script together with the formula it derives.
#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: &'static str,
    pub text: &'static str,
    pub goal: &'static str,
}

impl Fixture {
    pub fn script(&self) -> Result<ProofScript> {
        ProofScript::parse(self.text, &|p| Err(Error::Config(format!("fixture `{}` refers to file {p}", self.name))))
    }

    pub fn goal(&self) -> Result<Formula> {
        let s = self.script()?;
        Ok(parse(self.goal, &s.sig)?)
    }
}

const REFL: &str = "\
sig: K
1. @i' i' BY ax:refl
";

/// `@i p -> box @i p` from make-or-break for `box`.
const BACK: &str = "\
sig: K
rules: K
1. true BY taut
2. box true BY rule:1 sub{a:=true} from 1
3. (@i' p -> (box true <-> box (@i' p & true))) BY ax:mob:box sub{q1:=true}
4. (((@i' p & true) & (@i' p & true)) -> @i' p) BY taut
5. ((box (@i' p & true) & box (@i' p & true)) -> box @i' p) BY rule:2 sub{a:=(@i' p & true),b:=(@i' p & true),c:=@i' p} from 4
6. (box true -> ((@i' p -> (box true <-> box (@i' p & true))) -> (((box (@i' p & true) & box (@i' p & true)) -> box @i' p) -> (@i' p -> box @i' p)))) BY taut
7. ((@i' p -> (box true <-> box (@i' p & true))) -> (((box (@i' p & true) & box (@i' p & true)) -> box @i' p) -> (@i' p -> box @i' p))) BY mp 2 6
8. (((box (@i' p & true) & box (@i' p & true)) -> box @i' p) -> (@i' p -> box @i' p)) BY mp 3 7
9. (@i' p -> box @i' p) BY mp 5 8
";

/// `@i q / q`: from a derived `@i q` with `i` fresh, recover `q`.
const NAME_PRIME: &str = "\
sig: K
rules: K
tbox: { q }
1. q BY tbox:1
2. @i' q BY atgen 1 i'
3. ((i' & ~ q) -> @i' ~ q) BY ax:atintro sub{p:=~ q}
4. (~ @i' q <-> @i' ~ q) BY ax:atneg sub{p:=q}
5. (@i' q -> (((i' & ~ q) -> @i' ~ q) -> ((~ @i' q <-> @i' ~ q) -> (i' -> q)))) BY taut
6. (((i' & ~ q) -> @i' ~ q) -> ((~ @i' q <-> @i' ~ q) -> (i' -> q))) BY mp 2 5
7. ((~ @i' q <-> @i' ~ q) -> (i' -> q)) BY mp 3 6
8. (i' -> q) BY mp 4 7
9. q BY name 8 i'
";

/// `@j (p <-> q) / (box p <-> box q)` with `j` fresh.
const NAME_CONG: &str = "\
sig: K
rules: K
tbox: { (p <-> q) }
1. (p <-> q) BY tbox:1
2. @j' (p <-> q) BY atgen 1 j'
3. ((j' & ~ (p <-> q)) -> @j' ~ (p <-> q)) BY ax:atintro sub{p:=~ (p <-> q);i':=j'}
4. (~ @j' (p <-> q) <-> @j' ~ (p <-> q)) BY ax:atneg sub{p:=(p <-> q);i':=j'}
5. (@j' (p <-> q) -> (((j' & ~ (p <-> q)) -> @j' ~ (p <-> q)) -> ((~ @j' (p <-> q) <-> @j' ~ (p <-> q)) -> (j' -> (p <-> q))))) BY taut
6. (((j' & ~ (p <-> q)) -> @j' ~ (p <-> q)) -> ((~ @j' (p <-> q) <-> @j' ~ (p <-> q)) -> (j' -> (p <-> q)))) BY mp 2 5
7. ((~ @j' (p <-> q) <-> @j' ~ (p <-> q)) -> (j' -> (p <-> q))) BY mp 3 6
8. (j' -> (p <-> q)) BY mp 4 7
9. (p <-> q) BY name 8 j'
10. ((p <-> q) -> ((p & p) -> q)) BY taut
11. ((p & p) -> q) BY mp 9 10
12. ((box p & box p) -> box q) BY rule:2 sub{a:=p,b:=p,c:=q} from 11
13. ((p <-> q) -> ((q & q) -> p)) BY taut
14. ((q & q) -> p) BY mp 9 13
15. ((box q & box q) -> box p) BY rule:2 sub{a:=q,b:=q,c:=p} from 14
16. (((box p & box p) -> box q) -> (((box q & box q) -> box p) -> (box p <-> box q))) BY taut
17. (((box q & box q) -> box p) -> (box p <-> box q)) BY mp 12 16
18. (box p <-> box q) BY mp 15 17
";

/// Checked scripts for `@i i`, the back axiom, `Name'` and `NameCong`.
pub fn derived_rule_fixtures() -> Vec<Fixture> {
    vec![
        Fixture { name: "refl", text: REFL, goal: "@i' i'" },
        Fixture { name: "back-axiom", text: BACK, goal: "(@i' p -> box @i' p)" },
        Fixture { name: "name-prime", text: NAME_PRIME, goal: "q" },
        Fixture { name: "name-cong", text: NAME_CONG, goal: "(box p <-> box q)" },
    ]
}
