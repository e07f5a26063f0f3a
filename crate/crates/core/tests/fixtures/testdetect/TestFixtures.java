public class TestFixtures {
    public static final String NAME = "fixture";
    private final int count = compute();

    static int compute() { return 2; }
}
