import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "jsdom",
    include: ["tests/**/*.test.ts"],
    testTimeout: 30000,
    hookTimeout: 60000,
    // each file spawns its own backend; keep files sequential to avoid port storms
    fileParallelism: false,
  },
});
