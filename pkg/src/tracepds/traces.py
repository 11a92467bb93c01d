"""Dependence alphabets and Mazurkiewicz traces in Foata normal form.

Sets of letters are handled as bit masks over the alphabet order: bit ``i``
stands for ``alphabet.letters[i]``.  A trace is the tuple of masks of its
Foata blocks, so structural equality of traces is tuple equality.
"""

from functools import lru_cache

from .errors import InputError


def iter_bits(mask):
    """Yield the bit positions set in ``mask`` in increasing order."""
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def submasks(mask):
    """All submasks of ``mask``, starting with ``mask`` itself, ending with 0."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


class DependenceAlphabet:
    """A finite ordered letter set with a reflexive, symmetric dependence.

    ``dependencies`` may list any pairs; the reflexive and symmetric closure
    is applied here.
    """

    def __init__(self, letters, dependencies=()):
        letters = tuple(letters)
        if len(set(letters)) != len(letters):
            raise InputError(f"duplicate letters in {letters!r}")
        for a in letters:
            if not isinstance(a, str) or not a or a.isspace():
                raise InputError(f"invalid letter {a!r}")
        self.letters = letters
        self._index = {a: i for i, a in enumerate(letters)}
        dep = [1 << i for i in range(len(letters))]
        for a, b in dependencies:
            i, j = self.index(a), self.index(b)
            dep[i] |= 1 << j
            dep[j] |= 1 << i
        self._dep = tuple(dep)
        self.full = (1 << len(letters)) - 1
        self._dep_cache = {}
        self._blocks = None

    # -- basic lookups -------------------------------------------------
    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __contains__(self, a):
        return a in self._index

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, DependenceAlphabet):
            return NotImplemented
        return self.letters == other.letters and self._dep == other._dep

    def __hash__(self):
        return hash((self.letters, self._dep))

    def __repr__(self):
        deps = " ".join(f"{a}{b}" for a, b in self.dependency_pairs())
        return f"DependenceAlphabet({' '.join(self.letters)}; {deps})"

    def index(self, a):
        try:
            return self._index[a]
        except KeyError:
            raise InputError(f"unknown letter {a!r}") from None

    def bit(self, a):
        return 1 << self.index(a)

    def mask(self, letters):
        m = 0
        for a in letters:
            m |= 1 << self.index(a)
        return m

    def letters_of(self, mask):
        """Letters of ``mask`` in alphabet order."""
        return tuple(self.letters[i] for i in iter_bits(mask))

    # -- dependence ----------------------------------------------------
    def dep_mask(self, mask):
        """Mask of D(B) for the letter set ``mask``."""
        try:
            return self._dep_cache[mask]
        except KeyError:
            pass
        out = 0
        for i in iter_bits(mask):
            out |= self._dep[i]
        self._dep_cache[mask] = out
        return out

    def dep_letter(self, a):
        return self._dep[self.index(a)]

    def D(self, letters):
        """D(B) as a set of letters."""
        return frozenset(self.letters_of(self.dep_mask(self.mask(letters))))

    def depends(self, a, b):
        return bool(self._dep[self.index(a)] >> self.index(b) & 1)

    def independent(self, a, b):
        return not self.depends(a, b)

    def masks_independent(self, x, y):
        """``X ∥ Y``: every letter of ``x`` is independent of every letter of ``y``."""
        return not (self.dep_mask(x) & y)

    def is_independent_set(self, mask):
        for i in iter_bits(mask):
            if self._dep[i] & mask & ~(1 << i):
                return False
        return True

    def independent_sets(self):
        """All independent sets (including the empty one) as ascending masks."""
        if self._blocks is None:
            self._blocks = tuple(m for m in range(self.full + 1)
                                 if self.is_independent_set(m))
        return self._blocks

    def dependency_pairs(self):
        """Distinct dependent pairs ``(a, b)`` with ``a`` before ``b``."""
        out = []
        n = len(self.letters)
        for i in range(n):
            for j in range(i + 1, n):
                if self._dep[i] >> j & 1:
                    out.append((self.letters[i], self.letters[j]))
        return out

    def connected(self, letters):
        """Whether the graph (S, D ∩ S²) is connected; ∅ counts as connected."""
        mask = letters if isinstance(letters, int) else self.mask(letters)
        return self.connected_mask(mask)

    def connected_mask(self, mask):
        if mask == 0:
            return True
        start = mask & -mask
        seen = start
        frontier = start
        while frontier:
            grown = self.dep_mask(frontier) & mask & ~seen
            seen |= grown
            frontier = grown
        return seen == mask

    def twin_class(self, a):
        d = self._dep[self.index(a)]
        return frozenset(b for i, b in enumerate(self.letters) if self._dep[i] == d)

    def twin_classes(self):
        """Twin classes as letter tuples, ordered by their first letter."""
        seen = {}
        for i, a in enumerate(self.letters):
            seen.setdefault(self._dep[i], []).append(a)
        return [tuple(c) for c in seen.values()]

    def twin_index(self):
        return len(set(self._dep))

    # -- text format ---------------------------------------------------
    def to_text(self):
        lines = ["letters " + " ".join(self.letters)]
        lines += [f"dep {a} {b}" for a, b in self.dependency_pairs()]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        letters = None
        deps = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            words = raw.split("#", 1)[0].split()
            if not words:
                continue
            if words[0] == "letters":
                if letters is not None:
                    raise InputError("duplicate 'letters' line", lineno)
                letters = words[1:]
            elif words[0] == "dep":
                if len(words) != 3:
                    raise InputError("expected 'dep X Y'", lineno)
                deps.append((lineno, words[1], words[2]))
            else:
                raise InputError(f"unexpected keyword {words[0]!r}", lineno)
        if letters is None:
            raise InputError("missing 'letters' line")
        known = set(letters)
        for lineno, a, b in deps:
            for x in (a, b):
                if x not in known:
                    raise InputError(f"unknown letter {x!r}", lineno)
        return cls(letters, [(a, b) for _, a, b in deps])


class Trace:
    """An element of the trace monoid, stored as its Foata normal form.

    ``blocks`` is a tuple of nonempty independent-set masks where every block
    is contained in D of its predecessor.
    """

    __slots__ = ("alphabet", "blocks", "_hash")

    def __init__(self, alphabet, blocks=()):
        self.alphabet = alphabet
        self.blocks = tuple(blocks)
        self._hash = None

    @classmethod
    def from_word(cls, word, alphabet):
        """Foata normal form of ``[word]`` (left-fold insertion)."""
        blocks = []
        for a in word:
            _insert(blocks, alphabet.index(a), alphabet)
        return cls(alphabet, blocks)

    @classmethod
    def from_blocks(cls, blocks, alphabet):
        """Trace of an arbitrary block word ``[A_1 ⋯ A_n]``; blocks may be ∅."""
        out = []
        for block in blocks:
            for i in iter_bits(block):
                _insert(out, i, alphabet)
        return cls(alphabet, out)

    def __eq__(self, other):
        if not isinstance(other, Trace):
            return NotImplemented
        return self.blocks == other.blocks and self.alphabet == other.alphabet

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.blocks)
        return self._hash

    def __len__(self):
        return sum(bin(b).count("1") for b in self.blocks)

    def __repr__(self):
        return f"Trace({self.fnf_str()})"

    def __str__(self):
        return "".join(self.word())

    def __mul__(self, other):
        return self.concat(other)

    def _check(self, other):
        if self.alphabet != other.alphabet:
            raise InputError("traces over different dependence alphabets")

    def word(self):
        """Canonical linearization: blocks in order, each in alphabet order."""
        out = []
        for block in self.blocks:
            out.extend(self.alphabet.letters_of(block))
        return tuple(out)

    def fnf_str(self):
        if not self.blocks:
            return "1"
        return "".join("{" + ",".join(self.alphabet.letters_of(b)) + "}"
                       for b in self.blocks)

    def block_letters(self):
        return [list(self.alphabet.letters_of(b)) for b in self.blocks]

    def concat(self, other):
        self._check(other)
        blocks = list(self.blocks)
        for block in other.blocks:
            for i in iter_bits(block):
                _insert(blocks, i, self.alphabet)
        return Trace(self.alphabet, blocks)

    def alphabet_mask(self):
        m = 0
        for b in self.blocks:
            m |= b
        return m

    def pop(self, a):
        """``x'`` with ``self = x'·[a]`` if ``a`` is maximal, else ``None``."""
        bit = self.alphabet.bit(a)
        dep = self.alphabet.dep_mask(bit)
        last = None
        for j in range(len(self.blocks) - 1, -1, -1):
            if self.blocks[j] & bit:
                last = j
                break
        if last is None:
            return None
        for j in range(last + 1, len(self.blocks)):
            if self.blocks[j] & dep:
                return None
        word = list(self.word())
        k = len(word) - 1 - word[::-1].index(a)
        del word[k]
        return Trace.from_word(word, self.alphabet)

    def first_letters(self):
        """Letters ``a`` with ``self = [a]·x'`` for some ``x'``."""
        return self.alphabet.letters_of(self.blocks[0]) if self.blocks else ()

    def drop_first(self, a):
        word = list(self.word())
        word.remove(a)
        return Trace.from_word(word, self.alphabet)

    def linearizations(self):
        """Every word ``w`` with ``[w] = self``, in lexicographic letter order."""
        return _linearizations(self)


def _insert(blocks, i, alphabet):
    bit = 1 << i
    dep = alphabet._dep[i]
    j = len(blocks) - 1
    while j >= 0 and not blocks[j] & dep:
        j -= 1
    if j + 1 == len(blocks):
        blocks.append(bit)
    else:
        blocks[j + 1] |= bit


@lru_cache(maxsize=None)
def _linearizations(trace):
    if not trace.blocks:
        return ((),)
    out = []
    for a in trace.first_letters():
        for rest in _linearizations(trace.drop_first(a)):
            out.append((a,) + rest)
    return tuple(out)


def fnf_of_word(word, alphabet):
    return Trace.from_word(word, alphabet)


def trace_concat(x, y):
    return x.concat(y)


def trace_eq(x, y):
    x._check(y)
    return x.blocks == y.blocks


def pop_letter(x, a):
    return x.pop(a)


def is_efnf(blocks, alphabet):
    """Whether a block word is in extended Foata normal form."""
    prev = alphabet.full
    for block in blocks:
        if not alphabet.is_independent_set(block):
            return False
        if block & ~prev:
            return False
        prev = alphabet.dep_mask(block)
    return True


def factorizations(blocks, alphabet):
    """Yield every tuple ``(B_1, …, B_n)`` with ``B_i ⊆ A_i`` such that

    * ``(A_1∖B_1)…(A_n∖B_n)`` is in extended Foata normal form, and
    * ``B_i ∥ (A_j∖B_j)`` whenever ``i < j``.

    Each tuple gives the factorization ``[W] = x·y`` with
    ``x = [(A_i∖B_i)_i]`` and ``y = [(B_i)_i]``.
    """
    blocks = tuple(blocks)
    n = len(blocks)
    chosen = [0] * n

    def rec(i, prev_rest_dep, taken_dep):
        if i == n:
            yield tuple(chosen)
            return
        block = blocks[i]
        for b in submasks(block):
            rest = block & ~b
            if rest & ~prev_rest_dep:
                continue
            if rest & taken_dep:
                continue
            chosen[i] = b
            yield from rec(i + 1, alphabet.dep_mask(rest),
                           taken_dep | alphabet.dep_mask(b))

    yield from rec(0, alphabet.full, 0)


def split_by(blocks, choice, alphabet):
    """The pair ``(x, y)`` described by a factorization tuple."""
    x = Trace.from_blocks([a & ~b for a, b in zip(blocks, choice)], alphabet)
    y = Trace.from_blocks(choice, alphabet)
    return x, y


def all_traces(alphabet, max_len):
    """Every trace with at most ``max_len`` letters, shortest first.

    Order is deterministic: by length, then by canonical word.
    """
    layer = {Trace(alphabet)}
    out = [Trace(alphabet)]
    for _ in range(max_len):
        nxt = set()
        for t in layer:
            for a in alphabet.letters:
                nxt.add(t.concat(Trace.from_word(a, alphabet)))
        ordered = sorted(nxt, key=lambda t: [alphabet.index(a) for a in t.word()])
        out.extend(ordered)
        layer = nxt
    return out
