"""The restaurant commonsense knowledge base.

Signature (sorts, fluents, actions), effect/executability axioms, the
non-deterministic interference effects, initial-situation defaults, and the
relaxed-reachability check the intention layer uses to detect hopeless goals.

Fluent glossary (inertial unless noted):

    at(P,L)                person P is at location L (functional per person)
    inside(P)              P is inside the restaurant
    sitting(P)             P is seated at the table
    holding(P,T)           P holds thing T (food, bill, or the menu)
    on(T,L)                thing T lies at location L
    informed(R,F,S)        R was told by S that food F is wanted
    satiated(P)            P has eaten
    paid(B)                bill B is paid
    bill_generated(B,C)    bill B was produced for customer C
    open(R)                restaurant R is open
    available(F)           food F is in stock

Derived (static) fluents, defined over the above:

    order_transmitted(C)   some waiter was told C's order
    ready_to_eat(C)        sitting and order transmitted
    done_with_payment(C)   C's bill is paid
    satiated_and_out(C)    satiated and no longer inside
    served_and_billed(C)   satiated, and paid or a bill is on the table
"""

from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, Iterator, List, Optional, Set, Tuple

from restaurant_reader.logicform import (
    ACTION_OBS,
    Diagnostic,
    EntityDecl,
    FLUENT_OBS,
)
from restaurant_reader.terms import T, Term

LOCATIONS = ("entrance", "t", "kitchen", "counter")
MENU = "m"
DEFAULT_BILL = "b"

PERSON_SORTS = ("customer", "waitress", "cook", "people")

MENTAL_FUNCTORS = ("select", "start", "stop", "abandon", "replan")
EXOGENOUS = Term("interference")


class DomainError(ValueError):
    """Raised when a story's entity set cannot support the restaurant KB."""


@dataclass(frozen=True)
class ActionRule:
    """Ground semantics of one physical action instance.

    `positive`/`negative` are the physical executability literals;
    `protocol` holds the social-practice conditions that bind an agent's own
    intended occurrences but not story-observed ones (a story may well report
    someone flouting the practice, e.g. paying cash with no bill in sight).
    `nondet` lists the alternative add-sets an interference switches the
    action to; empty means interference cannot pair with this instance.
    """

    positive: Tuple[Term, ...]
    negative: Tuple[Term, ...]
    protocol: Tuple[Term, ...]
    adds: Tuple[Term, ...]
    dels: Tuple[Term, ...]
    nondet: Tuple[Tuple[Term, ...], ...] = ()


# ============================================================================
# domain specification
# ============================================================================


@dataclass
class DomainSpec:
    """Grounded restaurant KB over one story's entities. Immutable in use."""

    customers: Tuple[str, ...]
    waitresses: Tuple[str, ...]
    cooks: Tuple[str, ...]
    people: Tuple[str, ...]
    foods: Tuple[str, ...]
    restaurants: Tuple[str, ...]
    bills: Tuple[str, ...]
    bill_of: Dict[str, str]
    sorts: Tuple[str, ...] = (
        "customer",
        "restaurant",
        "food",
        "waitress",
        "cook",
        "people",
        "bill",
    )
    _rules: Dict[Term, Optional[ActionRule]] = field(default_factory=dict, repr=False)
    _ground_actions: Optional[Tuple[Term, ...]] = field(default=None, repr=False)
    _closures: Dict[FrozenSet[Term], FrozenSet[Term]] = field(
        default_factory=dict, repr=False
    )

    # ------------------------------------------------------------------
    # sort bookkeeping
    # ------------------------------------------------------------------

    @property
    def persons(self) -> Tuple[str, ...]:
        return self.customers + self.waitresses + self.cooks + self.people

    @property
    def staff(self) -> Tuple[str, ...]:
        return self.waitresses + self.cooks

    @property
    def things(self) -> Tuple[str, ...]:
        return self.foods + self.bills + (MENU,)

    def sort_of(self, name: str) -> Optional[str]:
        for sort, pool in (
            ("customer", self.customers),
            ("waitress", self.waitresses),
            ("cook", self.cooks),
            ("people", self.people),
            ("food", self.foods),
            ("restaurant", self.restaurants),
            ("bill", self.bills),
        ):
            if name in pool:
                return sort
        if name in LOCATIONS:
            return "location"
        if name == MENU:
            return "menu"
        return None

    def is_person(self, name: str) -> bool:
        return name in self.persons

    def agent_of(self, action: Term) -> Optional[str]:
        """The acting agent of a physical or mental action occurrence."""
        if action == EXOGENOUS:
            return None
        if action.args and action.args[0].is_constant:
            head = action.args[0].functor
            if self.is_person(head):
                return head
        return None

    def is_mental(self, action: Term) -> bool:
        return action.functor in MENTAL_FUNCTORS

    # ------------------------------------------------------------------
    # signature validation
    # ------------------------------------------------------------------

    def _arg_ok(self, want: str, got: Term) -> bool:
        if not got.is_constant:
            return False
        name = got.functor
        if want == "person":
            return self.is_person(name)
        if want == "thing":
            return name in self.things
        if want == "location":
            return name in LOCATIONS
        if want == "staff_or_customer":
            return name in self.customers or name in self.waitresses
        if want == "staff":
            return name in self.staff
        return self.sort_of(name) == want

    _ACTION_SIG = {
        "enter": [("person", "restaurant")],
        "greet": [("waitress", "person")],
        "lead_to": [("waitress", "person", "location")],
        "sit": [("person",)],
        "stand_up": [("person",)],
        "move": [("person", "location", "location")],
        "leave": [("person",)],
        "pick_up": [("person", "thing", "location")],
        "put": [("person", "thing", "location")],
        "order": [("person", "food", "waitress")],
        "request": [("waitress", "food", "cook"), ("person", "bill", "waitress")],
        "prepare": [("cook", "food", "waitress")],
        "eat": [("person", "food")],
        "pay": [("person", "bill")],
        "interference": [()],
    }

    _FLUENT_SIG = {
        "at": [("person", "location")],
        "inside": [("person",)],
        "sitting": [("person",)],
        "holding": [("person", "thing")],
        "on": [("thing", "location")],
        "informed": [("staff", "food", "staff_or_customer")],
        "satiated": [("person",)],
        "paid": [("bill",)],
        "bill_generated": [("bill", "person")],
        "open": [("restaurant",)],
        "available": [("food",)],
        # derived fluents are legal observation/goal subjects too
        "order_transmitted": [("person",)],
        "ready_to_eat": [("person",)],
        "done_with_payment": [("person",)],
        "satiated_and_out": [("person",)],
        "served_and_billed": [("person",)],
    }

    STATIC_FLUENTS = (
        "order_transmitted",
        "ready_to_eat",
        "done_with_payment",
        "satiated_and_out",
        "served_and_billed",
    )

    def check_term(self, term: Term, kind: str) -> List[Diagnostic]:
        """Diagnostics for an observation subject against the signature."""
        table = self._ACTION_SIG if kind == ACTION_OBS else self._FLUENT_SIG
        label = "action" if kind == ACTION_OBS else "fluent"
        out: List[Diagnostic] = []
        sigs = table.get(term.functor)
        if sigs is None:
            out.append(
                Diagnostic(
                    "unknown-symbol",
                    "%s is not a known %s symbol" % (term.functor, label),
                )
            )
            return out
        for sig in sigs:
            if len(sig) == len(term.args) and all(
                self._arg_ok(w, a) for w, a in zip(sig, term.args)
            ):
                return out
        # distinguish an undeclared entity from a plain sort mismatch
        for a in term.args:
            for c in a.constants():
                if self.sort_of(c) is None and not c.isdigit():
                    out.append(
                        Diagnostic(
                            "undeclared-entity",
                            "%s in %s is not a declared entity or builtin"
                            % (c, term.render()),
                        )
                    )
        if not out:
            out.append(
                Diagnostic(
                    "sort-mismatch",
                    "%s does not match any signature of %s/%d"
                    % (term.render(), term.functor, len(term.args)),
                )
            )
        return out

    # ------------------------------------------------------------------
    # grounding
    # ------------------------------------------------------------------

    def inertial_fluents(self) -> Iterator[Term]:
        for p in self.persons:
            for l in LOCATIONS:
                yield T("at", p, l)
            yield T("inside", p)
            yield T("sitting", p)
            for t in self.things:
                yield T("holding", p, t)
            yield T("satiated", p)
        for t in self.things:
            for l in LOCATIONS:
                yield T("on", t, l)
        for r in self.waitresses + self.cooks:
            for f in self.foods:
                for s in self.customers + self.waitresses:
                    yield T("informed", r, f, s)
        for b in self.bills:
            yield T("paid", b)
            for c in self.customers:
                yield T("bill_generated", b, c)
        for r in self.restaurants:
            yield T("open", r)
        for f in self.foods:
            yield T("available", f)

    def ground_physical_actions(self) -> Tuple[Term, ...]:
        """Every well-sorted physical action instance (for reachability and
        query generation)."""
        if self._ground_actions is not None:
            return self._ground_actions
        out: List[Term] = []
        for c in self.customers + self.people:
            for r in self.restaurants:
                out.append(T("enter", c, r))
        for w in self.waitresses:
            for p in self.customers + self.people:
                out.append(T("greet", w, p))
                out.append(T("lead_to", w, p, "t"))
        for p in self.persons:
            out.append(T("sit", p))
            out.append(T("stand_up", p))
            out.append(T("leave", p))
            for l1 in LOCATIONS:
                for l2 in LOCATIONS:
                    if l1 != l2:
                        out.append(T("move", p, l1, l2))
            for t in self.things:
                for l in LOCATIONS:
                    out.append(T("pick_up", p, t, l))
                    out.append(T("put", p, t, l))
            for f in self.foods:
                out.append(T("eat", p, f))
            for b in self.bills:
                out.append(T("pay", p, b))
        for c in self.customers + self.people:
            for f in self.foods:
                for w in self.waitresses:
                    out.append(T("order", c, f, w))
            for b in self.bills:
                for w in self.waitresses:
                    out.append(T("request", c, b, w))
        for w in self.waitresses:
            for f in self.foods:
                for k in self.cooks:
                    out.append(T("request", w, f, k))
        for k in self.cooks:
            for f in self.foods:
                for w in self.waitresses:
                    out.append(T("prepare", k, f, w))
        object.__setattr__(self, "_ground_actions", tuple(out))
        return self._ground_actions

    # ------------------------------------------------------------------
    # initial situation
    # ------------------------------------------------------------------

    def initial_defaults(self) -> Set[Term]:
        """The true-by-default fluents at reasoning step 0.

        The restaurant is open, listed dishes are in stock, the menu lies on
        the table, customers wait at the entrance outside, and staff are at
        their stations inside. Every fluent not returned defaults to false.
        """
        true: Set[Term] = set()
        for c in self.customers:
            true.add(T("at", c, "entrance"))
        for w in self.waitresses:
            true.add(T("at", w, "t"))
            true.add(T("inside", w))
        for k in self.cooks:
            true.add(T("at", k, "kitchen"))
            true.add(T("inside", k))
        for p in self.people:
            true.add(T("at", p, "t"))
            true.add(T("inside", p))
        true.add(T("on", MENU, "t"))
        for r in self.restaurants:
            true.add(T("open", r))
        for f in self.foods:
            true.add(T("available", f))
        return true

    # ------------------------------------------------------------------
    # action rules
    # ------------------------------------------------------------------

    def rule(self, action: Term) -> Optional[ActionRule]:
        """The ActionRule for a ground physical action; None if ill-formed."""
        if action in self._rules:
            return self._rules[action]
        built = self._build_rule(action)
        self._rules[action] = built
        return built

    def _build_rule(self, action: Term) -> Optional[ActionRule]:
        f = action.functor
        a = [x.functor for x in action.args]

        def mk(pos=(), neg=(), proto=(), adds=(), dels=(), nondet=()):
            return ActionRule(
                tuple(pos), tuple(neg), tuple(proto), tuple(adds), tuple(dels),
                tuple(tuple(br) for br in nondet),
            )

        if f == "enter" and len(a) == 2:
            p, r = a
            return mk(
                pos=[T("at", p, "entrance"), T("open", r)],
                neg=[T("inside", p)],
                adds=[T("inside", p)],
            )
        if f == "greet" and len(a) == 2:
            return mk(pos=[T("inside", a[1])])
        if f == "lead_to" and len(a) == 3:
            w, p, l = a
            return mk(
                pos=[T("inside", p), T("at", p, "entrance")],
                adds=[T("at", p, l), T("at", w, l)],
                dels=[T("at", p, "entrance")] + (
                    [] if w == p else [T("at", w, lw) for lw in LOCATIONS if lw != l]
                ),
            )
        if f == "sit" and len(a) == 1:
            return mk(
                pos=[T("at", a[0], "t")],
                neg=[T("sitting", a[0])],
                adds=[T("sitting", a[0])],
            )
        if f == "stand_up" and len(a) == 1:
            return mk(pos=[T("sitting", a[0])], dels=[T("sitting", a[0])])
        if f == "move" and len(a) == 3:
            p, l1, l2 = a
            if l1 == l2:
                return None
            proto = []
            if p in self.waitresses and l1 == "t" and l2 == "kitchen":
                # serving practice: the waiter heads to the kitchen only once
                # some order reached her
                proto = [
                    T("informed", p, fo, c)
                    for fo in self.foods
                    for c in self.customers
                ]
            if p in self.waitresses and l2 == "counter":
                # billing practice: nothing to fetch before a bill exists
                proto = [
                    T("bill_generated", b, c)
                    for b in self.bills
                    for c in self.customers
                ]
            return mk(
                pos=[T("at", p, l1)],
                proto=proto,
                adds=[T("at", p, l2)],
                dels=[T("at", p, l1)],
            )
        if f == "leave" and len(a) == 1:
            p = a[0]
            return mk(
                pos=[T("at", p, "entrance"), T("inside", p)],
                dels=[T("inside", p)],
            )
        if f == "pick_up" and len(a) == 3:
            p, t, l = a
            nondet: List[List[Term]] = []
            if t in self.foods:
                nondet = [[T("holding", p, f2)] for f2 in self.foods if f2 != t]
            elif t in self.bills:
                nondet = [[T("holding", p, b2)] for b2 in self.bills if b2 != t]
            return mk(
                pos=[T("at", p, l), T("on", t, l)],
                adds=[T("holding", p, t)],
                dels=[T("on", t, l)],
                nondet=nondet,
            )
        if f == "put" and len(a) == 3:
            p, t, l = a
            return mk(
                pos=[T("holding", p, t), T("at", p, l)],
                adds=[T("on", t, l)],
                dels=[T("holding", p, t)],
            )
        if f == "order" and len(a) == 3:
            c, fo, w = a
            return mk(
                pos=[T("sitting", c), T("at", w, "t")],
                proto=[T("available", fo)],
                adds=[T("informed", w, fo, c)],
                nondet=[[T("informed", w, f2, c)] for f2 in self.foods if f2 != fo],
            )
        if f == "request" and len(a) == 3:
            if a[0] in self.waitresses and a[1] in self.foods:
                # the knowledge condition (some customer told W about F) is
                # disjunctive and checked in executable() via request_sources
                w, fo, k = a
                return mk(
                    pos=[T("at", w, "kitchen")],
                    adds=[T("informed", k, fo, w)],
                    nondet=[
                        [T("informed", k, f2, w)] for f2 in self.foods if f2 != fo
                    ],
                )
            c, b, w = a
            return mk(
                pos=[T("sitting", c), T("at", w, "t")],
                adds=[T("bill_generated", b, c), T("on", b, "counter")],
            )
        if f == "prepare" and len(a) == 3:
            k, fo, w = a
            return mk(
                pos=[
                    T("at", k, "kitchen"),
                    T("informed", k, fo, w),
                    T("available", fo),
                ],
                adds=[T("on", fo, "kitchen")],
                nondet=[[T("on", f2, "kitchen")] for f2 in self.foods if f2 != fo],
            )
        if f == "eat" and len(a) == 2:
            c, fo = a
            return mk(
                pos=[T("sitting", c), T("on", fo, "t")],
                adds=[T("satiated", c)],
                dels=[T("on", fo, "t")],
            )
        if f == "pay" and len(a) == 2:
            p, b = a
            return mk(proto=[T("on", b, "t")], adds=[T("paid", b)])
        if f == "interference" and not a:
            return mk()
        return None

    def request_sources(self, w: str, fo: str) -> Tuple[Term, ...]:
        """The disjunctive knowledge condition of request(W,F,Ck): some
        customer told W about F."""
        return tuple(T("informed", w, fo, c) for c in self.customers)

    # ------------------------------------------------------------------
    # fluent evaluation (inertial membership + static definitions)
    # ------------------------------------------------------------------

    def is_static(self, fluent: Term) -> bool:
        return fluent.functor in self.STATIC_FLUENTS

    def holds(
        self,
        true_set: FrozenSet[Term],
        fluent: Term,
        relaxed: bool = False,
        granted: FrozenSet[Term] = frozenset(),
    ) -> bool:
        """Evaluate a fluent over a set of true inertial atoms.

        With relaxed=True, negative literals inside static definitions are
        treated as satisfied -- the delete-free reading used by the futility
        check. Fluents in `granted` count as true outright; the intention
        layer grants a nested sub-activity's goal when judging whether its
        parent is worth entering (trust your sub-plans until they are due).
        """
        if fluent in granted:
            return True
        f = fluent.functor
        if f not in self.STATIC_FLUENTS:
            return fluent in true_set
        who = fluent.args[0].functor
        if f == "order_transmitted":
            return any(
                T("informed", w, fo, who) in true_set
                for w in self.waitresses
                for fo in self.foods
            )
        if f == "ready_to_eat":
            return T("sitting", who) in true_set and self.holds(
                true_set, T("order_transmitted", who), relaxed, granted
            )
        if f == "done_with_payment":
            bill = self.bill_of.get(who)
            return bill is not None and T("paid", bill) in true_set
        if f == "satiated_and_out":
            out = relaxed or T("inside", who) not in true_set
            return T("satiated", who) in true_set and out
        if f == "served_and_billed":
            billed = self.holds(
                true_set, T("done_with_payment", who), relaxed, granted
            ) or any(T("on", b, "t") in true_set for b in self.bills)
            return T("satiated", who) in true_set and billed
        raise ValueError("unknown static fluent %s" % fluent.render())

    # ------------------------------------------------------------------
    # executability
    # ------------------------------------------------------------------

    def executable(self, true_set: FrozenSet[Term], action: Term) -> bool:
        """Physical executability (protocol conditions not included)."""
        rule = self.rule(action)
        if rule is None:
            return False
        if not all(p in true_set for p in rule.positive):
            return False
        if any(n in true_set for n in rule.negative):
            return False
        if action.functor == "request" and action.args[1].functor in self.foods:
            if not any(s in true_set for s in self.request_sources(
                action.args[0].functor, action.args[1].functor
            )):
                return False
        return True

    def protocol_ok(self, true_set: FrozenSet[Term], action: Term) -> bool:
        """Social-practice conditions; disjunctive over their instances."""
        rule = self.rule(action)
        if rule is None or not rule.protocol:
            return True
        return any(p in true_set for p in rule.protocol)

    # ------------------------------------------------------------------
    # relaxed reachability (futility oracle)
    # ------------------------------------------------------------------

    def relaxed_closure(self, true_set: FrozenSet[Term]) -> FrozenSet[Term]:
        """Delete-free fixpoint: every fluent that could ever become true if
        effects never undid anything. Negative conditions are ignored;
        protocol conditions are kept (agents only intend practice-conformant
        action, and the observed past is already in the state)."""
        cached = self._closures.get(true_set)
        if cached is not None:
            return cached
        reached = set(true_set)
        actions = self.ground_physical_actions()
        changed = True
        while changed:
            changed = False
            for act in actions:
                rule = self.rule(act)
                if rule is None:
                    continue
                if not all(p in reached for p in rule.positive):
                    continue
                if rule.protocol and not any(p in reached for p in rule.protocol):
                    continue
                if act.functor == "request" and act.args[1].functor in self.foods:
                    if not any(
                        s in reached
                        for s in self.request_sources(
                            act.args[0].functor, act.args[1].functor
                        )
                    ):
                        continue
                for add in rule.adds:
                    if add not in reached:
                        reached.add(add)
                        changed = True
                for branch in rule.nondet:
                    for add in branch:
                        if add not in reached:
                            reached.add(add)
                            changed = True
        result = frozenset(reached)
        self._closures[true_set] = result
        return result

    def goal_reachable(
        self,
        true_set: FrozenSet[Term],
        goal: Term,
        granted: FrozenSet[Term] = frozenset(),
    ) -> bool:
        """Could the goal's positive requirements ever be met (delete-free)?"""
        return self.holds(
            self.relaxed_closure(true_set), goal, relaxed=True, granted=granted
        )

    def action_reachable(self, true_set: FrozenSet[Term], action: Term) -> bool:
        """Could this action ever become executable and practice-conformant?"""
        rule = self.rule(action)
        if rule is None:
            return False
        reached = self.relaxed_closure(true_set)
        if not all(p in reached for p in rule.positive):
            return False
        if rule.protocol and not any(p in reached for p in rule.protocol):
            return False
        if action.functor == "request" and action.args[1].functor in self.foods:
            if not any(
                s in reached
                for s in self.request_sources(
                    action.args[0].functor, action.args[1].functor
                )
            ):
                return False
        return True


# ============================================================================
# construction
# ============================================================================


def build_restaurant_domain(entities: List[EntityDecl]) -> DomainSpec:
    """Ground the restaurant KB over a story's declared entities.

    Raises DomainError when no customer is declared or when more than one
    waitress is (one waiter per story is a documented limitation).
    """
    pools: Dict[str, List[str]] = {s: [] for s in (
        "customer", "restaurant", "food", "waitress", "cook", "people", "bill"
    )}
    for ent in entities:
        if ent.sort not in pools:
            raise DomainError("unknown sort %s" % ent.sort)
        if ent.name not in pools[ent.sort]:
            pools[ent.sort].append(ent.name)
    if not pools["customer"]:
        raise DomainError("no customer declared; restaurant stories need one")
    if len(pools["waitress"]) > 1:
        raise DomainError("more than one waitress per story is unsupported")

    bills = list(pools["bill"])
    if DEFAULT_BILL not in bills:
        bills.insert(0, DEFAULT_BILL)

    # one canonical bill per customer, in declaration order; grow the pool
    # with fresh names when a story has more customers than bills
    bill_of: Dict[str, str] = {}
    taken = {e.name for e in entities} | set(bills)
    for i, c in enumerate(pools["customer"]):
        while i >= len(bills):
            n = 2
            while "b%d" % n in taken:
                n += 1
            bills.append("b%d" % n)
            taken.add("b%d" % n)
        bill_of[c] = bills[i]

    return DomainSpec(
        customers=tuple(pools["customer"]),
        waitresses=tuple(pools["waitress"]),
        cooks=tuple(pools["cook"]),
        people=tuple(pools["people"]),
        foods=tuple(pools["food"]),
        restaurants=tuple(pools["restaurant"]),
        bills=tuple(bills),
        bill_of=bill_of,
    )
