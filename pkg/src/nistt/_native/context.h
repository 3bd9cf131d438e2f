/*
 * Stackful cooperative contexts for the kernel scheduler.
 *
 * On x86-64 a hand-rolled switch is used: the glibc swapcontext path costs a
 * sigprocmask syscall per switch, which would dwarf the per-quantum work of
 * the bundled workloads. Other architectures (or -DSK_FORCE_UCONTEXT) fall
 * back to ucontext, which is fully portable.
 *
 * Contract: sk_ctx_switch(save, load) stores the callee-saved machine state
 * on the current stack, parks the stack pointer in *save, and resumes the
 * context whose stack pointer is load. A fresh context built by
 * sk_ctx_prepare enters `entry` on its own stack the first time it is
 * switched to; `entry` must never return (it must switch away).
 */
#ifndef SK_CONTEXT_H
#define SK_CONTEXT_H

#include <stdint.h>
#include <stdlib.h>
#include <string.h>

#if defined(__x86_64__) && !defined(SK_FORCE_UCONTEXT)

typedef struct {
    void *sp;
} sk_ctx;

__asm__(
    ".text\n"
    ".p2align 4\n"
    ".local sk_ctx_switch_asm\n"
    ".type sk_ctx_switch_asm,@function\n"
    "sk_ctx_switch_asm:\n"
    "  pushq %rbp\n"
    "  pushq %rbx\n"
    "  pushq %r12\n"
    "  pushq %r13\n"
    "  pushq %r14\n"
    "  pushq %r15\n"
    "  subq $8, %rsp\n"
    "  stmxcsr 4(%rsp)\n"
    "  fnstcw (%rsp)\n"
    "  movq %rsp, (%rdi)\n"
    "  movq %rsi, %rsp\n"
    "  fldcw (%rsp)\n"
    "  ldmxcsr 4(%rsp)\n"
    "  addq $8, %rsp\n"
    "  popq %r15\n"
    "  popq %r14\n"
    "  popq %r13\n"
    "  popq %r12\n"
    "  popq %rbx\n"
    "  popq %rbp\n"
    "  ret\n"
    ".size sk_ctx_switch_asm,.-sk_ctx_switch_asm\n");

void sk_ctx_switch_asm(void **save_sp, void *load_sp);

static inline void sk_ctx_switch(sk_ctx *save, sk_ctx *load)
{
    sk_ctx_switch_asm(&save->sp, load->sp);
}

/* Lay out an initial stack frame that sk_ctx_switch_asm can "return" into:
 * [fp control words][r15..rbp zeros][entry][guard]. The guard slot keeps the
 * stack pointer 16-byte aligned at entry per the psABI. */
static inline void sk_ctx_prepare(sk_ctx *ctx, void *stack_base, size_t stack_size,
                                  void (*entry)(void))
{
    uintptr_t top = ((uintptr_t)stack_base + stack_size) & ~(uintptr_t)15;
    uint64_t *sp = (uint64_t *)top;
    *--sp = 0;                   /* guard return address, never used */
    *--sp = (uint64_t)entry;     /* `ret` target */
    for (int i = 0; i < 6; i++)  /* r15, r14, r13, r12, rbx, rbp */
        *--sp = 0;
    --sp;                        /* mxcsr + x87 control word slot */
    uint32_t mxcsr;
    uint16_t fcw;
    __asm__ volatile("stmxcsr %0" : "=m"(mxcsr));
    __asm__ volatile("fnstcw %0" : "=m"(fcw));
    memcpy(sp, &fcw, 2);
    memcpy((char *)sp + 4, &mxcsr, 4);
    ctx->sp = sp;
}

#else /* portable fallback */

#include <ucontext.h>

typedef struct {
    ucontext_t uc;
} sk_ctx;

static inline void sk_ctx_switch(sk_ctx *save, sk_ctx *load)
{
    swapcontext(&save->uc, &load->uc);
}

static inline void sk_ctx_prepare(sk_ctx *ctx, void *stack_base, size_t stack_size,
                                  void (*entry)(void))
{
    getcontext(&ctx->uc);
    ctx->uc.uc_stack.ss_sp = stack_base;
    ctx->uc.uc_stack.ss_size = stack_size;
    ctx->uc.uc_link = NULL;
    makecontext(&ctx->uc, entry, 0);
}

#endif

#endif /* SK_CONTEXT_H */
