import { defineConfig } from 'vitest/config';

export default defineConfig({
  test: {
    globals: true,
    include: ['tests/**/*.test.ts'],
    // e2e starts a real service process and identifies a 60 s log
    testTimeout: 60_000,
    hookTimeout: 180_000,
  },
});
