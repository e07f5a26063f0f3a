public class LatestTest {
    private void testInternal() {
    }
    void testPackagePrivate() {
    }
}
