"""
Conflict-driven clause learning SAT solver

Two watched literals per clause, first-UIP conflict analysis with
non-chronological backjumping, learned clauses kept for the solver's lifetime.
Branching picks the lowest-index unassigned variable and tries it positive.
"""

from typing import Dict, List, Optional
from src.knowledge.cnf import CnfFormula
from src.utils.logger import LoggerMixin


class CdclSolver(LoggerMixin):
    """
    Incremental CDCL solver over a CnfFormula

    Clauses can be added between solve() calls; count_models() uses this to add
    blocking clauses. A solver that has proven UNSAT stays UNSAT.
    """

    def __init__(self, formula: CnfFormula):
        self.num_vars = formula.num_vars
        n = self.num_vars + 1
        self._value = [0] * n  # 0 unassigned, 1 true, -1 false
        self._level = [0] * n
        self._reason: List[Optional[int]] = [None] * n
        self._trail: List[int] = []
        self._trail_lim: List[int] = []
        self._qhead = 0
        self._clauses: List[List[int]] = []
        self._watches: Dict[int, List[int]] = {
            lit: [] for v in range(1, n) for lit in (v, -v)
        }
        self._unsat = False
        self.stats = {"decisions": 0, "conflicts": 0, "propagations": 0, "learned": 0}
        for clause in formula.clauses:
            self.add_clause(clause)

    def _lit_value(self, lit: int) -> int:
        v = self._value[abs(lit)]
        return v if lit > 0 else -v

    def _decision_level(self) -> int:
        return len(self._trail_lim)

    def _enqueue(self, lit: int, reason: Optional[int]) -> None:
        v = abs(lit)
        self._value[v] = 1 if lit > 0 else -1
        self._level[v] = self._decision_level()
        self._reason[v] = reason
        self._trail.append(lit)

    def _attach(self, clause: List[int]) -> int:
        index = len(self._clauses)
        self._clauses.append(clause)
        self._watches[clause[0]].append(index)
        self._watches[clause[1]].append(index)
        return index

    def _cancel_until(self, level: int) -> None:
        if self._decision_level() <= level:
            return
        start = self._trail_lim[level]
        for lit in self._trail[start:]:
            v = abs(lit)
            self._value[v] = 0
            self._reason[v] = None
        del self._trail[start:]
        del self._trail_lim[level:]
        self._qhead = len(self._trail)

    def add_clause(self, clause) -> None:
        """Add a clause at decision level 0"""
        if self._unsat:
            return
        self._cancel_until(0)
        lits = []
        for lit in dict.fromkeys(int(x) for x in clause):
            if abs(lit) > self.num_vars or lit == 0:
                raise ValueError(f"literal {lit} outside 1..{self.num_vars}")
            if -lit in lits:
                return  # tautology
            val = self._lit_value(lit)
            if val == 1:
                return
            if val == 0:
                lits.append(lit)
        if not lits:
            self._unsat = True
        elif len(lits) == 1:
            self._enqueue(lits[0], None)
        else:
            self._attach(lits)

    def _propagate(self) -> Optional[int]:
        """Unit propagation; returns the index of a conflicting clause or None"""
        while self._qhead < len(self._trail):
            false_lit = -self._trail[self._qhead]
            self._qhead += 1
            self.stats["propagations"] += 1
            watchers = self._watches[false_lit]
            kept: List[int] = []
            i = 0
            while i < len(watchers):
                ci = watchers[i]
                i += 1
                c = self._clauses[ci]
                if c[0] == false_lit:
                    c[0], c[1] = c[1], c[0]
                if self._lit_value(c[0]) == 1:
                    kept.append(ci)
                    continue
                for k in range(2, len(c)):
                    if self._lit_value(c[k]) != -1:
                        c[1], c[k] = c[k], c[1]
                        self._watches[c[1]].append(ci)
                        break
                else:
                    kept.append(ci)
                    if self._lit_value(c[0]) == -1:
                        kept.extend(watchers[i:])
                        self._watches[false_lit] = kept
                        self._qhead = len(self._trail)
                        return ci
                    self._enqueue(c[0], ci)
            self._watches[false_lit] = kept
        return None

    def _analyze(self, conflict: int):
        """First-UIP learning; returns (learned clause, backjump level)"""
        seen = set()
        learnt: List[int] = [0]
        counter = 0
        pivot = 0
        index = len(self._trail) - 1
        clause = self._clauses[conflict]
        level = self._decision_level()
        while True:
            for q in clause:
                v = abs(q)
                if v == pivot or v in seen or self._level[v] == 0:
                    continue
                seen.add(v)
                if self._level[v] == level:
                    counter += 1
                else:
                    learnt.append(q)
            while abs(self._trail[index]) not in seen:
                index -= 1
            p = self._trail[index]
            index -= 1
            pivot = abs(p)
            counter -= 1
            if counter == 0:
                break
            clause = self._clauses[self._reason[pivot]]
        learnt[0] = -p
        if len(learnt) == 1:
            return learnt, 0
        # second watch goes on the literal assigned deepest
        deepest = max(range(1, len(learnt)), key=lambda k: self._level[abs(learnt[k])])
        learnt[1], learnt[deepest] = learnt[deepest], learnt[1]
        return learnt, self._level[abs(learnt[1])]

    def _pick_branch(self) -> Optional[int]:
        for v in range(1, self.num_vars + 1):
            if self._value[v] == 0:
                return v
        return None

    def solve(self) -> Optional[List[int]]:
        """
        Search for a satisfying assignment

        Returns:
            Signed literal per variable 1..num_vars, or None when UNSAT
        """
        if self._unsat:
            return None
        self._cancel_until(0)
        while True:
            conflict = self._propagate()
            if conflict is not None:
                self.stats["conflicts"] += 1
                if self._decision_level() == 0:
                    self._unsat = True
                    return None
                learnt, back_level = self._analyze(conflict)
                self._cancel_until(back_level)
                if len(learnt) == 1:
                    self._enqueue(learnt[0], None)
                else:
                    self._enqueue(learnt[0], self._attach(learnt))
                    self.stats["learned"] += 1
                continue
            v = self._pick_branch()
            if v is None:
                return [v if self._value[v] == 1 else -v for v in range(1, self.num_vars + 1)]
            self.stats["decisions"] += 1
            self._trail_lim.append(len(self._trail))
            self._enqueue(v, None)

    def count_models(self, limit: int) -> int:
        """
        Count satisfying assignments up to limit by adding blocking clauses

        The solver keeps the blocking clauses afterwards.
        """
        count = 0
        while count < limit:
            model = self.solve()
            if model is None:
                break
            count += 1
            self.add_clause([-lit for lit in model])
        self.logger.debug("models_counted", count=count, limit=limit, **self.stats)
        return count
