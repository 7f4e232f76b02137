# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the kernels in ``_pykernels``; same semantics."""
import time

import numpy as np
cimport numpy as cnp

cnp.import_array()

cdef enum:
    UNK = 0
    IN = 1
    OUT = 2

FOUND, EXHAUSTED, NODE_LIMIT, TIMED_OUT = 1, 0, 2, 3


def vertex_masks(grid):
    cdef cnp.uint8_t[:, :, ::1] g = np.ascontiguousarray(grid != 0, dtype=np.uint8)
    cdef Py_ssize_t nx = g.shape[0] - 1, ny = g.shape[1] - 1, nz = g.shape[2] - 1
    out = np.zeros((max(nx, 0), max(ny, 0), max(nz, 0)), dtype=np.uint8)
    cdef cnp.uint8_t[:, :, ::1] m = out
    cdef Py_ssize_t i, j, k
    for i in range(nx):
        for j in range(ny):
            for k in range(nz):
                m[i, j, k] = (g[i, j, k] | (g[i + 1, j, k] << 1) | (g[i, j + 1, k] << 2)
                              | (g[i + 1, j + 1, k] << 3) | (g[i, j, k + 1] << 4)
                              | (g[i + 1, j, k + 1] << 5) | (g[i, j + 1, k + 1] << 6)
                              | (g[i + 1, j + 1, k + 1] << 7))
    return out


cdef inline int _mixed4(int s) nogil:
    return 1 if 0 < s < 4 else 0


def boundary_counts(grid):
    cdef cnp.uint8_t[:, :, ::1] g = np.ascontiguousarray(grid != 0, dtype=np.uint8)
    cdef Py_ssize_t X = g.shape[0], Y = g.shape[1], Z = g.shape[2]
    cdef Py_ssize_t i, j, k
    cdef long nv = 0, ne = 0, nf = 0
    cdef int s
    for i in range(X):
        for j in range(Y):
            for k in range(Z):
                if i + 1 < X and j + 1 < Y and k + 1 < Z:
                    s = (g[i, j, k] + g[i + 1, j, k] + g[i, j + 1, k] + g[i + 1, j + 1, k]
                         + g[i, j, k + 1] + g[i + 1, j, k + 1] + g[i, j + 1, k + 1] + g[i + 1, j + 1, k + 1])
                    if 0 < s < 8:
                        nv += 1
                if j + 1 < Y and k + 1 < Z:
                    ne += _mixed4(g[i, j, k] + g[i, j + 1, k] + g[i, j, k + 1] + g[i, j + 1, k + 1])
                if i + 1 < X and k + 1 < Z:
                    ne += _mixed4(g[i, j, k] + g[i + 1, j, k] + g[i, j, k + 1] + g[i + 1, j, k + 1])
                if i + 1 < X and j + 1 < Y:
                    ne += _mixed4(g[i, j, k] + g[i + 1, j, k] + g[i, j + 1, k] + g[i + 1, j + 1, k])
                if i + 1 < X and g[i, j, k] != g[i + 1, j, k]:
                    nf += 1
                if j + 1 < Y and g[i, j, k] != g[i, j + 1, k]:
                    nf += 1
                if k + 1 < Z and g[i, j, k] != g[i, j, k + 1]:
                    nf += 1
    return int(nv), int(ne), int(nf)


cdef int _local_chi(cnp.uint8_t[:, :, ::1] g, Py_ssize_t i, Py_ssize_t j, Py_ssize_t k) nogil:
    cdef int v = 0, e = 0, f = 0, s
    cdef Py_ssize_t a, b, c
    for a in range(i - 1, i + 1):
        for b in range(j - 1, j + 1):
            for c in range(k - 1, k + 1):
                s = (g[a, b, c] + g[a + 1, b, c] + g[a, b + 1, c] + g[a + 1, b + 1, c]
                     + g[a, b, c + 1] + g[a + 1, b, c + 1] + g[a, b + 1, c + 1] + g[a + 1, b + 1, c + 1])
                if 0 < s < 8:
                    v += 1
    for b in range(j - 1, j + 1):
        for c in range(k - 1, k + 1):
            e += _mixed4(g[i, b, c] + g[i, b + 1, c] + g[i, b, c + 1] + g[i, b + 1, c + 1])
    for a in range(i - 1, i + 1):
        for c in range(k - 1, k + 1):
            e += _mixed4(g[a, j, c] + g[a + 1, j, c] + g[a, j, c + 1] + g[a + 1, j, c + 1])
    for a in range(i - 1, i + 1):
        for b in range(j - 1, j + 1):
            e += _mixed4(g[a, b, k] + g[a + 1, b, k] + g[a, b + 1, k] + g[a + 1, b + 1, k])
    s = g[i, j, k]
    f = ((s != g[i - 1, j, k]) + (s != g[i + 1, j, k]) + (s != g[i, j - 1, k])
         + (s != g[i, j + 1, k]) + (s != g[i, j, k - 1]) + (s != g[i, j, k + 1]))
    return v - e + f


def toggle_scan(grid, table, cands):
    cdef cnp.uint8_t[:, :, ::1] g = np.array(grid != 0, dtype=np.uint8, order="C")
    cdef const cnp.uint8_t[::1] tab = np.ascontiguousarray(table, dtype=np.uint8)
    cdef cnp.int64_t[:, ::1] cs = np.ascontiguousarray(cands, dtype=np.int64).reshape(-1, 3)
    cdef Py_ssize_t n = cs.shape[0], t
    ok_arr = np.ones(n, dtype=np.uint8)
    dchi_arr = np.zeros(n, dtype=np.int64)
    cdef cnp.uint8_t[::1] ok = ok_arr
    cdef cnp.int64_t[::1] dchi = dchi_arr
    cdef Py_ssize_t i, j, k, vi, vj, vk
    cdef int mask, before, after
    with nogil:
        for t in range(n):
            i = cs[t, 0]
            j = cs[t, 1]
            k = cs[t, 2]
            for vi in range(i - 1, i + 1):
                for vj in range(j - 1, j + 1):
                    for vk in range(k - 1, k + 1):
                        mask = (g[vi, vj, vk] | (g[vi + 1, vj, vk] << 1) | (g[vi, vj + 1, vk] << 2)
                                | (g[vi + 1, vj + 1, vk] << 3) | (g[vi, vj, vk + 1] << 4)
                                | (g[vi + 1, vj, vk + 1] << 5) | (g[vi, vj + 1, vk + 1] << 6)
                                | (g[vi + 1, vj + 1, vk + 1] << 7))
                        mask ^= 1 << ((i - vi) + 2 * (j - vj) + 4 * (k - vk))
                        if tab[mask] == 3:
                            ok[t] = 0
            before = _local_chi(g, i, j, k)
            g[i, j, k] ^= 1
            after = _local_chi(g, i, j, k)
            g[i, j, k] ^= 1
            dchi[t] = after - before
    return ok_arr, dchi_arr


# --------------------------------------------------------------------------
# Hamiltonian path search by edge-state propagation
# --------------------------------------------------------------------------

cdef class _Search:
    cdef int N, E, S, T, total, qlen, tlen, square_rule, timed_out
    cdef long nodes, node_limit
    cdef double t0, time_limit
    cdef int[::1] eu, ev, inc_ptr, inc_idx, inc_sorted, esq_ptr, esq_idx, target, vpri
    cdef int[:, ::1] sq
    cdef int[::1] st, nin, nunk, sqin, squnk, oe, seen, stack
    cdef int[::1] qk, qx            # propagation queue (kind, id)
    cdef int[::1] tk, tx, ty        # undo trail

    cdef bint setedge(self, int k, int val):
        cdef int u, v, a, b, p, kk, s
        if self.st[k] != UNK:
            return self.st[k] == val
        self.st[k] = val
        u = self.eu[k]
        v = self.ev[k]
        self.push_trail(0, k, 0)
        self.nunk[u] -= 1
        self.nunk[v] -= 1
        for p in range(self.esq_ptr[k], self.esq_ptr[k + 1]):
            self.squnk[self.esq_idx[p]] -= 1
        if val == IN:
            self.nin[u] += 1
            self.nin[v] += 1
            self.total += 1
            for p in range(self.esq_ptr[k], self.esq_ptr[k + 1]):
                self.sqin[self.esq_idx[p]] += 1
            if self.nin[u] > self.target[u] or self.nin[v] > self.target[v]:
                return False
            a = self.oe[u]
            b = self.oe[v]
            if a == v:
                return False
            self.push_trail(1, a, self.oe[a])
            self.push_trail(1, b, self.oe[b])
            self.oe[a] = b
            self.oe[b] = a
            if ((a == self.S and b == self.T) or (a == self.T and b == self.S)) and self.total != self.N - 1:
                return False
            for p in range(self.inc_ptr[a], self.inc_ptr[a + 1]):
                kk = self.inc_idx[p]
                if (self.eu[kk] == b or self.ev[kk] == b) and self.st[kk] == UNK:
                    self.push_queue(0, kk)
        self.push_queue(1, u)
        self.push_queue(1, v)
        if self.square_rule:
            for p in range(self.esq_ptr[k], self.esq_ptr[k + 1]):
                self.push_queue(2, self.esq_idx[p])
        return True

    cdef inline void push_trail(self, int kind, int x, int y):
        self.tk[self.tlen] = kind
        self.tx[self.tlen] = x
        self.ty[self.tlen] = y
        self.tlen += 1

    cdef inline void push_queue(self, int kind, int x):
        self.qk[self.qlen] = kind
        self.qx[self.qlen] = x
        self.qlen += 1

    cdef void undo(self, int mark):
        cdef int k, u, v, val, p
        while self.tlen > mark:
            self.tlen -= 1
            if self.tk[self.tlen] == 1:
                self.oe[self.tx[self.tlen]] = self.ty[self.tlen]
                continue
            k = self.tx[self.tlen]
            u = self.eu[k]
            v = self.ev[k]
            val = self.st[k]
            self.st[k] = UNK
            self.nunk[u] += 1
            self.nunk[v] += 1
            for p in range(self.esq_ptr[k], self.esq_ptr[k + 1]):
                self.squnk[self.esq_idx[p]] += 1
            if val == IN:
                self.nin[u] -= 1
                self.nin[v] -= 1
                self.total -= 1
                for p in range(self.esq_ptr[k], self.esq_ptr[k + 1]):
                    self.sqin[self.esq_idx[p]] -= 1

    cdef bint propagate(self, int base):
        """Drain the queue down to ``base`` (LIFO, matching the Python list)."""
        cdef int kind, x, v, p, k, s
        while self.qlen > base:
            self.qlen -= 1
            kind = self.qk[self.qlen]
            x = self.qx[self.qlen]
            if kind == 0:
                if not self.setedge(x, OUT):
                    self.qlen = base
                    return False
            elif kind == 1:
                v = x
                if self.nin[v] == self.target[v]:
                    for p in range(self.inc_ptr[v], self.inc_ptr[v + 1]):
                        k = self.inc_idx[p]
                        if self.st[k] == UNK and not self.setedge(k, OUT):
                            self.qlen = base
                            return False
                elif self.nin[v] + self.nunk[v] < self.target[v]:
                    self.qlen = base
                    return False
                elif self.nin[v] + self.nunk[v] == self.target[v]:
                    for p in range(self.inc_ptr[v], self.inc_ptr[v + 1]):
                        k = self.inc_idx[p]
                        if self.st[k] == UNK and not self.setedge(k, IN):
                            self.qlen = base
                            return False
            else:
                s = x
                if self.sqin[s] > 2:
                    self.qlen = base
                    return False
                if self.sqin[s] == 2 and self.squnk[s] > 0:
                    for p in range(4):
                        k = self.sq[s, p]
                        if self.st[k] == UNK and not self.setedge(k, OUT):
                            self.qlen = base
                            return False
        return True

    cdef bint connected(self):
        cdef int i, x, y, p, k, top = 0, c = 1
        for i in range(self.N):
            self.seen[i] = 0
        self.seen[0] = 1
        self.stack[0] = 0
        top = 1
        while top > 0:
            top -= 1
            x = self.stack[top]
            for p in range(self.inc_ptr[x], self.inc_ptr[x + 1]):
                k = self.inc_idx[p]
                if self.st[k] != OUT:
                    y = self.ev[k] if self.eu[k] == x else self.eu[k]
                    if not self.seen[y]:
                        self.seen[y] = 1
                        c += 1
                        self.stack[top] = y
                        top += 1
        return c == self.N

    cdef bint rec(self):
        cdef int v, best = -1, bn = 0, bp = 0, k = -1, p, kk, val, mark, base
        self.nodes += 1
        if self.nodes > self.node_limit:
            return False
        if (self.nodes & 1023) == 0 and time.perf_counter() - self.t0 > self.time_limit:
            self.timed_out = 1
            return False
        if self.total == self.N - 1:
            return True
        if not self.connected():
            return False
        for v in range(self.N):
            if self.nin[v] < self.target[v]:
                if best < 0 or self.nunk[v] < bn or (self.nunk[v] == bn and self.vpri[v] < bp):
                    best = v
                    bn = self.nunk[v]
                    bp = self.vpri[v]
        if best < 0:
            return False
        for p in range(self.inc_ptr[best], self.inc_ptr[best + 1]):
            kk = self.inc_sorted[p]
            if self.st[kk] == UNK:
                k = kk
                break
        if k < 0:
            return False
        for val in (IN, OUT):
            mark = self.tlen
            base = self.qlen
            if self.setedge(k, val) and self.propagate(base) and self.rec():
                return True
            self.qlen = base
            self.undo(mark)
            if self.nodes > self.node_limit or self.timed_out:
                return False
        return False


def edge_search(int nverts, edges, inc_ptr, inc_idx, squares, esq_ptr, esq_idx,
                target, forced, epri, vpri, int start, int end, long node_limit,
                double time_limit, square_rule):
    cdef _Search s = _Search()
    cdef int N = nverts, E = len(edges), v, i
    i32 = np.int32
    edges = np.asarray(edges, dtype=i32).reshape(-1, 2)
    s.N = N
    s.E = E
    s.S = start
    s.T = end
    s.eu = np.ascontiguousarray(edges[:, 0])
    s.ev = np.ascontiguousarray(edges[:, 1])
    s.inc_ptr = np.ascontiguousarray(inc_ptr, dtype=i32)
    s.inc_idx = np.ascontiguousarray(inc_idx, dtype=i32)
    ep = np.asarray(epri)
    srt = np.empty(len(inc_idx), dtype=i32)
    for v in range(N):
        seg = np.asarray(inc_idx[inc_ptr[v]:inc_ptr[v + 1]])
        srt[inc_ptr[v]:inc_ptr[v + 1]] = sorted(seg.tolist(), key=lambda k: ep[k])
    s.inc_sorted = srt
    s.sq = np.ascontiguousarray(np.asarray(squares, dtype=i32).reshape(-1, 4))
    s.esq_ptr = np.ascontiguousarray(esq_ptr, dtype=i32)
    s.esq_idx = np.ascontiguousarray(esq_idx, dtype=i32)
    s.target = np.ascontiguousarray(target, dtype=i32)
    s.vpri = np.ascontiguousarray(vpri, dtype=i32)
    s.st = np.zeros(E, dtype=i32)
    s.nin = np.zeros(N, dtype=i32)
    s.nunk = np.diff(np.asarray(inc_ptr, dtype=i32)).astype(i32)
    nsq = s.sq.shape[0]
    s.sqin = np.zeros(nsq, dtype=i32)
    s.squnk = np.full(nsq, 4, dtype=i32)
    s.oe = np.arange(N, dtype=i32)
    s.seen = np.zeros(N, dtype=i32)
    s.stack = np.zeros(N + 1, dtype=i32)
    qcap = 16 * E + 4 * N + 64
    s.qk = np.zeros(qcap, dtype=i32)
    s.qx = np.zeros(qcap, dtype=i32)
    tcap = 3 * E + 16
    s.tk = np.zeros(tcap, dtype=i32)
    s.tx = np.zeros(tcap, dtype=i32)
    s.ty = np.zeros(tcap, dtype=i32)
    s.total = 0
    s.qlen = 0
    s.tlen = 0
    s.square_rule = 1 if square_rule else 0
    s.nodes = 0
    s.node_limit = node_limit
    s.time_limit = time_limit
    s.timed_out = 0
    s.t0 = time.perf_counter()

    cdef bint ok = True
    for k in forced:
        if not s.setedge(int(k), IN):
            ok = False
            break
    ok = ok and s.propagate(0)
    if ok:
        for v in range(N):
            s.push_queue(1, v)
        ok = s.propagate(0)
    found = ok and (N == 1 or s.rec())
    state = np.asarray(s.st).astype(np.uint8)
    if found:
        return FOUND, int(s.nodes), state
    if s.timed_out:
        return TIMED_OUT, int(s.nodes), state
    if s.nodes > node_limit:
        return NODE_LIMIT, int(s.nodes), state
    return EXHAUSTED, int(s.nodes), state
